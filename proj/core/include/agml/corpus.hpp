#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "agml/domain.hpp"
#include "agml/features.hpp"

namespace agml {

/// One alphabet character: a named system-level operation.
struct OperationDef {
    std::string id;
    std::string display_name;
    std::string description;
    NodeFeatures features{};
    std::vector<Domain> domains;

    bool in_domain(Domain d) const;
};

using OperationTable = std::map<std::string, OperationDef, std::less<>>;

/// Star-free attack expression: atoms, concatenation and union.
struct AttackExpr {
    enum class Kind { Atom, Concat, Union };

    Kind kind = Kind::Atom;
    std::string op;                  // Atom only
    std::vector<AttackExpr> children;  // Concat/Union, size >= 2

    static AttackExpr atom(std::string op);
    static AttackExpr concat(std::vector<AttackExpr> parts);
    static AttackExpr alternation(std::vector<AttackExpr> parts);

    bool operator==(const AttackExpr& other) const = default;
};

/// Parses the vector DSL. `.` binds tighter than `+`; parentheses group.
/// Nested operators of the same kind are flattened. When `ops` is non-null
/// every atom must name a declared operation.
AttackExpr parse_expression(std::string_view text, const OperationTable* ops = nullptr);
inline AttackExpr parse_expression(std::string_view text, const OperationTable& ops) {
    return parse_expression(text, &ops);
}

/// Rewrites `ch_i(description)` character notation into snake_case ids and
/// maps `{}`/`[]` groupings onto parentheses.
std::string normalize_character_notation(std::string_view text);

// Flattens same-kind nesting and sorts union members by their rendering.
AttackExpr canonicalize(const AttackExpr& expr);

std::string unparse(const AttackExpr& expr);

// |L(expr)|: Atom 1, Union sum, Concat product.
std::uint64_t language_size(const AttackExpr& expr);

void collect_atoms(const AttackExpr& expr, std::vector<std::string>& out);

struct AttackVector {
    std::string name;
    Domain domain = Domain::SdnCp;
    std::string source;  // expression text as written
    AttackExpr expr;
    std::size_t line = 0;
};

struct CorpusFile {
    std::string version;
    std::vector<OperationDef> operations;
    std::vector<AttackVector> vectors;

    OperationTable operation_table() const;
};

/// Reads the two-section corpus text format. Throws MalformedInput with the
/// 1-based line number on structural problems; semantic problems (dangling
/// atoms, duplicate ids) are left for validate_corpus.
CorpusFile parse_corpus(std::string_view text);
CorpusFile load_corpus(const std::string& path);

struct ValidationIssue {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
};

std::vector<ValidationIssue> validate_corpus(const CorpusFile& file);

}  // namespace agml
