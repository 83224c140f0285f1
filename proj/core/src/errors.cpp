#include "agml/errors.hpp"

#include <sstream>

namespace agml {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownOperation: return "UnknownOperation";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::CycleIntroduced: return "CycleIntroduced";
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::NodeNotInGraph: return "NodeNotInGraph";
        case ErrorCode::DomainMismatch: return "DomainMismatch";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::SingleClassTraining: return "SingleClassTraining";
        case ErrorCode::NonBinaryFeature: return "NonBinaryFeature";
        case ErrorCode::WidthMismatch: return "WidthMismatch";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CorruptModel: return "CorruptModel";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NoEligibleModel: return "NoEligibleModel";
        case ErrorCode::InvalidCount: return "InvalidCount";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string syntax_message(std::size_t position, const std::vector<std::string>& expected,
                           const std::string& found) {
    std::ostringstream os;
    os << "at position " << position << ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) os << (i + 1 == expected.size() ? " or " : ", ");
        os << expected[i];
    }
    os << ", found " << found;
    return os.str();
}

}  // namespace

SyntaxError::SyntaxError(std::size_t position, std::vector<std::string> expected,
                         const std::string& found)
    : Error(ErrorCode::SyntaxError, syntax_message(position, expected, found)),
      position_(position),
      expected_(std::move(expected)) {}

MalformedInput::MalformedInput(std::size_t position, const std::string& message)
    : Error(ErrorCode::MalformedInput, "at " + std::to_string(position) + ": " + message),
      position_(position) {}

}  // namespace agml
