#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "agml/corpus.hpp"

namespace agml::test {

inline std::string data_path(const std::string& name) { return std::string(AGML_DATA_DIR) + "/" + name; }

inline OperationTable make_ops(const std::vector<std::string>& ids) {
    OperationTable t;
    for (const auto& id : ids) t[id] = OperationDef{id, id, "", {}, {Domain::SdnCp}};
    return t;
}

// Random star-free AST over distinct atoms a0, a1, ... so no atom repeats.
// Language size stays below max_lang.
class AstGen {
public:
    explicit AstGen(std::uint64_t seed) : rng_(seed) {}

    AttackExpr make(int depth, std::uint64_t max_lang) {
        for (;;) {
            next_ = 0;
            AttackExpr e = build(depth);
            if (language_size(e) <= max_lang) return e;
        }
    }

    int atoms_used() const { return next_; }

private:
    AttackExpr build(int depth) {
        std::uniform_int_distribution<int> kind(0, 2), width(2, 3);
        if (depth == 0 || kind(rng_) == 0) return AttackExpr::atom("a" + std::to_string(next_++));
        std::vector<AttackExpr> kids;
        int n = width(rng_);
        for (int i = 0; i < n; ++i) kids.push_back(build(depth - 1));
        return std::uniform_int_distribution<int>(0, 1)(rng_) ? AttackExpr::concat(std::move(kids))
                                                              : AttackExpr::alternation(std::move(kids));
    }

    std::mt19937_64 rng_;
    int next_ = 0;
};

// Every string of L(e), by recursive expansion of union choices.
inline std::vector<std::vector<std::string>> language(const AttackExpr& e) {
    using Lang = std::vector<std::vector<std::string>>;
    switch (e.kind) {
        case AttackExpr::Kind::Atom: return {{e.op}};
        case AttackExpr::Kind::Union: {
            Lang out;
            for (const auto& c : e.children) {
                Lang l = language(c);
                out.insert(out.end(), l.begin(), l.end());
            }
            return out;
        }
        case AttackExpr::Kind::Concat: {
            Lang out{{}};
            for (const auto& c : e.children) {
                Lang next, l = language(c);
                for (const auto& prefix : out)
                    for (const auto& s : l) {
                        auto w = prefix;
                        w.insert(w.end(), s.begin(), s.end());
                        next.push_back(std::move(w));
                    }
                out = std::move(next);
            }
            return out;
        }
    }
    return {};
}

}  // namespace agml::test
