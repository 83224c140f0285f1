#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agml {

enum class ErrorCode {
    UnknownOperation,
    SyntaxError,
    EmptyGroup,
    CycleIntroduced,
    MalformedInput,
    NodeNotInGraph,
    DomainMismatch,
    TooFewSamples,
    OutOfRange,
    SingleClassTraining,
    NonBinaryFeature,
    WidthMismatch,
    VersionMismatch,
    CorruptModel,
    LengthMismatch,
    NoEligibleModel,
    InvalidCount,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported as an Error carrying
/// a stable code; the CLI maps these onto exit status 1.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, std::vector<std::string> expected, const std::string& found);

    std::size_t position() const noexcept { return position_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::vector<std::string> expected_;
};

class MalformedInput : public Error {
public:
    MalformedInput(std::size_t position, const std::string& message);

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace agml
