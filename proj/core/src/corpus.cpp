#include "agml/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "agml/errors.hpp"
#include "agml/graph.hpp"

namespace agml {

bool OperationDef::in_domain(Domain d) const {
    return std::find(domains.begin(), domains.end(), d) != domains.end();
}

AttackExpr AttackExpr::atom(std::string op) {
    AttackExpr e;
    e.kind = Kind::Atom;
    e.op = std::move(op);
    return e;
}

AttackExpr AttackExpr::concat(std::vector<AttackExpr> parts) {
    AttackExpr e;
    e.kind = Kind::Concat;
    e.children = std::move(parts);
    return e;
}

AttackExpr AttackExpr::alternation(std::vector<AttackExpr> parts) {
    AttackExpr e;
    e.kind = Kind::Union;
    e.children = std::move(parts);
    return e;
}

namespace {

bool is_id_start(char c) { return c >= 'a' && c <= 'z'; }
bool is_id_char(char c) { return is_id_start(c) || (c >= '0' && c <= '9') || c == '_'; }

class Parser {
public:
    Parser(std::string_view text, const OperationTable* ops) : text_(text), ops_(ops) {}

    AttackExpr run() {
        skip_ws();
        if (pos_ == text_.size()) fail({"operation id", "'('"});
        AttackExpr e = parse_union();
        skip_ws();
        if (pos_ != text_.size()) fail({"'.'", "'+'", "end of input"});
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'"
                                                : std::string("end of input");
        throw SyntaxError(pos_, std::move(expected), found);
    }

    static void append_flat(std::vector<AttackExpr>& parts, AttackExpr e, AttackExpr::Kind kind) {
        if (e.kind == kind) {
            for (auto& c : e.children) parts.push_back(std::move(c));
        } else {
            parts.push_back(std::move(e));
        }
    }

    AttackExpr parse_union() {
        std::vector<AttackExpr> parts;
        append_flat(parts, parse_concat(), AttackExpr::Kind::Union);
        skip_ws();
        while (pos_ < text_.size() && text_[pos_] == '+') {
            ++pos_;
            append_flat(parts, parse_concat(), AttackExpr::Kind::Union);
            skip_ws();
        }
        if (parts.size() == 1) return std::move(parts.front());
        return AttackExpr::alternation(std::move(parts));
    }

    AttackExpr parse_concat() {
        std::vector<AttackExpr> parts;
        append_flat(parts, parse_primary(), AttackExpr::Kind::Concat);
        skip_ws();
        while (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            append_flat(parts, parse_primary(), AttackExpr::Kind::Concat);
            skip_ws();
        }
        if (parts.size() == 1) return std::move(parts.front());
        return AttackExpr::concat(std::move(parts));
    }

    AttackExpr parse_primary() {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            std::size_t open = pos_++;
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == ')')
                throw Error(ErrorCode::EmptyGroup, "empty parentheses at position " +
                                                       std::to_string(open));
            AttackExpr inner = parse_union();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ')') fail({"')'", "'.'", "'+'"});
            ++pos_;
            return inner;
        }
        if (pos_ < text_.size() && is_id_start(text_[pos_])) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && is_id_char(text_[pos_])) ++pos_;
            std::string id(text_.substr(start, pos_ - start));
            if (ops_ && ops_->find(id) == ops_->end())
                throw Error(ErrorCode::UnknownOperation, id);
            return AttackExpr::atom(std::move(id));
        }
        fail({"operation id", "'('"});
    }

    std::string_view text_;
    const OperationTable* ops_;
    std::size_t pos_ = 0;
};

std::string render(const AttackExpr& e) {
    switch (e.kind) {
        case AttackExpr::Kind::Atom: return e.op;
        case AttackExpr::Kind::Concat: {
            std::string out;
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += " . ";
                const auto& c = e.children[i];
                if (c.kind == AttackExpr::Kind::Atom) {
                    out += render(c);
                } else {
                    out += "(" + render(c) + ")";
                }
            }
            return out;
        }
        case AttackExpr::Kind::Union: {
            std::string out;
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += " + ";
                const auto& c = e.children[i];
                if (c.kind == AttackExpr::Kind::Union) {
                    out += "(" + render(c) + ")";
                } else {
                    out += render(c);
                }
            }
            return out;
        }
    }
    return {};
}

std::string snake_case(std::string_view text) {
    std::string out;
    bool pending = false;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            if (pending && !out.empty()) out += '_';
            pending = false;
            out += static_cast<char>(std::tolower(c));
        } else {
            pending = true;
        }
    }
    if (!out.empty() && !is_id_start(out.front())) out.insert(out.begin(), 'x');
    return out;
}

}  // namespace

AttackExpr parse_expression(std::string_view text, const OperationTable* ops) {
    return Parser(text, ops).run();
}

std::string normalize_character_notation(std::string_view text) {
    std::string raw;
    std::size_t i = 0;
    auto starts_char = [&](std::size_t at) {
        if (at < text.size() && text[at] == '$') ++at;
        return text.substr(at, 3) == "ch_";
    };
    while (i < text.size()) {
        if (starts_char(i)) {
            std::size_t j = i;
            if (text[j] == '$') ++j;
            j += 3;
            // Subscript: i, j, 11, {11}, possibly closed by '$'.
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                       text[j] == '{' || text[j] == '}' || text[j] == '_'))
                ++j;
            if (j < text.size() && text[j] == '$') ++j;
            while (j < text.size() && text[j] == ' ') ++j;
            if (j < text.size() && text[j] == '(') {
                int depth = 1;
                std::size_t k = j + 1;
                while (k < text.size() && depth > 0) {
                    if (text[k] == '(') ++depth;
                    if (text[k] == ')') --depth;
                    ++k;
                }
                std::string_view desc = text.substr(j + 1, k - j - 2);
                raw += ' ';
                raw += snake_case(desc);
                raw += ' ';
                i = k;
                continue;
            }
        }
        char c = text[i];
        if (c == '{' || c == '[') c = '(';
        if (c == '}' || c == ']') c = ')';
        if (c == '$') c = ' ';
        raw += c;
        ++i;
    }

    // Re-space so every operator sits between single blanks.
    std::string out;
    for (char c : raw) {
        if (c == '.' || c == '+') {
            while (!out.empty() && out.back() == ' ') out.pop_back();
            out += ' ';
            out += c;
            out += ' ';
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty() && out.back() != ' ' && out.back() != '(') out += ' ';
        } else if (c == ')') {
            while (!out.empty() && out.back() == ' ') out.pop_back();
            out += c;
        } else {
            out += c;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

AttackExpr canonicalize(const AttackExpr& expr) {
    if (expr.kind == AttackExpr::Kind::Atom) return expr;
    std::vector<AttackExpr> parts;
    for (const auto& c : expr.children) {
        AttackExpr cc = canonicalize(c);
        if (cc.kind == expr.kind) {
            for (auto& g : cc.children) parts.push_back(std::move(g));
        } else {
            parts.push_back(std::move(cc));
        }
    }
    if (expr.kind == AttackExpr::Kind::Union) {
        std::vector<std::pair<std::string, AttackExpr>> keyed;
        for (auto& p : parts) keyed.emplace_back(render(p), std::move(p));
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        parts.clear();
        for (auto& k : keyed) parts.push_back(std::move(k.second));
    }
    AttackExpr out;
    out.kind = expr.kind;
    out.children = std::move(parts);
    return out;
}

std::string unparse(const AttackExpr& expr) { return render(canonicalize(expr)); }

std::uint64_t language_size(const AttackExpr& expr) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    switch (expr.kind) {
        case AttackExpr::Kind::Atom: return 1;
        case AttackExpr::Kind::Union: {
            std::uint64_t sum = 0;
            for (const auto& c : expr.children) {
                std::uint64_t s = language_size(c);
                sum = s > kMax - sum ? kMax : sum + s;
            }
            return sum;
        }
        case AttackExpr::Kind::Concat: {
            std::uint64_t prod = 1;
            for (const auto& c : expr.children) {
                std::uint64_t s = language_size(c);
                prod = s != 0 && prod > kMax / s ? kMax : prod * s;
            }
            return prod;
        }
    }
    return 0;
}

void collect_atoms(const AttackExpr& expr, std::vector<std::string>& out) {
    if (expr.kind == AttackExpr::Kind::Atom) {
        out.push_back(expr.op);
        return;
    }
    for (const auto& c : expr.children) collect_atoms(c, out);
}

OperationTable CorpusFile::operation_table() const {
    OperationTable table;
    for (const auto& op : operations) table.emplace(op.id, op);
    return table;
}

namespace {

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ','))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

// Splits on blanks, keeping "quoted text" (and key="quoted text") whole.
std::vector<std::string> tokenize(const std::string& line, std::size_t lineno) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        std::string tok;
        bool quoted = false;
        while (i < line.size() && (quoted || !std::isspace(static_cast<unsigned char>(line[i])))) {
            if (line[i] == '"') quoted = !quoted;
            tok += line[i++];
        }
        if (quoted) throw MalformedInput(lineno, "unterminated quote");
        out.push_back(std::move(tok));
    }
    return out;
}

std::string unquote(const std::string& s, std::size_t lineno) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"')
        throw MalformedInput(lineno, "expected quoted text, found " + s);
    return s.substr(1, s.size() - 2);
}

OperationDef parse_op_line(const std::vector<std::string>& toks, std::size_t lineno) {
    if (toks.size() < 3) throw MalformedInput(lineno, "op line needs an id and a display name");
    OperationDef op;
    op.id = toks[1];
    op.display_name = unquote(toks[2], lineno);
    bool saw_domains = false;
    for (std::size_t i = 3; i < toks.size(); ++i) {
        const std::string& t = toks[i];
        auto eq = t.find('=');
        if (eq == std::string::npos) throw MalformedInput(lineno, "unexpected token " + t);
        std::string key = t.substr(0, eq), value = t.substr(eq + 1);
        if (key == "features") {
            for (const auto& name : split_list(value)) {
                auto idx = feature_index(name);
                if (!idx) throw MalformedInput(lineno, "unknown feature " + name);
                op.features[*idx] = 1;
            }
        } else if (key == "domains") {
            saw_domains = true;
            for (const auto& tag : split_list(value)) {
                auto d = parse_domain(tag);
                if (!d) throw MalformedInput(lineno, "unknown domain " + tag);
                if (!op.in_domain(*d)) op.domains.push_back(*d);
            }
        } else if (key == "desc") {
            op.description = unquote(value, lineno);
        } else {
            throw MalformedInput(lineno, "unknown key " + key);
        }
    }
    if (!saw_domains || op.domains.empty())
        throw MalformedInput(lineno, "op " + op.id + " lists no domains");
    std::sort(op.domains.begin(), op.domains.end());
    for (Domain d : op.domains) op.features[domain_feature(d)] = 1;
    return op;
}

}  // namespace

CorpusFile parse_corpus(std::string_view text) {
    CorpusFile file;
    enum class Section { None, Ops, Vectors } section = Section::None;
    Domain vector_domain = Domain::SdnCp;

    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw MalformedInput(lineno, "unterminated section header");
            std::string header = trim(std::string_view(line).substr(1, line.size() - 2));
            if (header == "ops") {
                section = Section::Ops;
            } else if (header.rfind("vectors", 0) == 0) {
                std::string rest = trim(std::string_view(header).substr(7));
                if (rest.rfind("domain=", 0) != 0)
                    throw MalformedInput(lineno, "vectors section needs domain=<TAG>");
                auto d = parse_domain(rest.substr(7));
                if (!d) throw MalformedInput(lineno, "unknown domain " + rest.substr(7));
                vector_domain = *d;
                section = Section::Vectors;
            } else {
                throw MalformedInput(lineno, "unknown section " + header);
            }
            continue;
        }

        if (line.rfind("version ", 0) == 0 && section == Section::None) {
            file.version = trim(std::string_view(line).substr(8));
            continue;
        }

        if (section == Section::Ops) {
            auto toks = tokenize(line, lineno);
            if (toks.front() != "op") throw MalformedInput(lineno, "expected op line");
            file.operations.push_back(parse_op_line(toks, lineno));
        } else if (section == Section::Vectors) {
            if (line.rfind("vector ", 0) != 0) throw MalformedInput(lineno, "expected vector line");
            auto colon = line.find(':');
            if (colon == std::string::npos) throw MalformedInput(lineno, "vector line needs ':'");
            AttackVector v;
            v.name = trim(std::string_view(line).substr(7, colon - 7));
            v.domain = vector_domain;
            v.source = trim(std::string_view(line).substr(colon + 1));
            v.line = lineno;
            if (v.name.empty()) throw MalformedInput(lineno, "vector without a name");
            try {
                v.expr = parse_expression(v.source);
            } catch (const Error& e) {
                throw MalformedInput(lineno, "vector " + v.name + ": " + e.what());
            }
            file.vectors.push_back(std::move(v));
        } else {
            throw MalformedInput(lineno, "content before the first section");
        }
    }
    return file;
}

CorpusFile load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_corpus(ss.str());
}

std::vector<ValidationIssue> validate_corpus(const CorpusFile& file) {
    std::vector<ValidationIssue> issues;
    auto error = [&](std::string code, std::string msg) {
        issues.push_back({ValidationIssue::Severity::Error, std::move(code), std::move(msg)});
    };
    auto warning = [&](std::string code, std::string msg) {
        issues.push_back({ValidationIssue::Severity::Warning, std::move(code), std::move(msg)});
    };

    OperationTable table;
    for (const auto& op : file.operations) {
        bool valid_id = !op.id.empty() && is_id_start(op.id.front()) &&
                        std::all_of(op.id.begin(), op.id.end(), is_id_char);
        if (!valid_id) error("InvalidIdentifier", "operation id '" + op.id + "'");
        if (!table.emplace(op.id, op).second) error("DuplicateOperation", op.id);

        for (Domain d : kAllDomains) {
            if (op.features[domain_feature(d)] && !op.in_domain(d))
                warning("DomainFeatureMismatch", op.id + " sets feature " +
                                                     std::string(kFeatureNames[domain_feature(d)]) +
                                                     " but is not in domain " +
                                                     std::string(to_string(d)));
        }
        if (op.features[kHeadFeature] || op.features[kTailFeature])
            warning("PositionalFeature", op.id + " lists head/tail; these come from the graph");
    }

    std::set<std::string> used;
    std::set<std::string> names;
    for (const auto& v : file.vectors) {
        if (!names.insert(v.name).second) error("DuplicateVector", v.name);
        std::vector<std::string> atoms;
        collect_atoms(v.expr, atoms);
        bool dangling = false;
        for (const auto& a : atoms) {
            used.insert(a);
            auto it = table.find(a);
            if (it == table.end()) {
                error("UnknownOperation", "vector " + v.name + " references " + a);
                dangling = true;
            } else if (!it->second.in_domain(v.domain)) {
                warning("OperationOutsideDomain", "vector " + v.name + " uses " + a +
                                                      " outside its domains");
            }
        }
        if (dangling) continue;
        try {
            expr_to_graph(v.expr, v.domain);
        } catch (const Error& e) {
            error("CycleIntroduced", "vector " + v.name + ": " + e.what());
        }
    }

    bool vectors_ok = std::none_of(issues.begin(), issues.end(), [](const ValidationIssue& i) {
        return i.severity == ValidationIssue::Severity::Error;
    });
    if (vectors_ok) {
        try {
            build_domain_graphs(file);
        } catch (const Error& e) {
            error("CycleIntroduced", std::string("aggregate: ") + e.what());
        }
    }

    for (const auto& op : file.operations)
        if (!used.count(op.id)) warning("UnusedOperation", op.id);
    return issues;
}

}  // namespace agml
