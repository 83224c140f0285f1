#include <algorithm>
#include <limits>

#include "learners_internal.hpp"

namespace agml::detail {

namespace {

struct Builder {
    const WeightedRows& data;
    const Hyperparameters& hp;
    TreeParams out;

    static double gini(double pos, double neg) {
        double n = pos + neg;
        if (n == 0) return 0;
        double p = pos / n, q = neg / n;
        return 1.0 - p * p - q * q;
    }

    int grow(const std::vector<std::size_t>& idx, int depth) {
        double pos = 0, neg = 0;
        for (auto i : idx) (data.labels[i] == Label::Positive ? pos : neg) += data.weights[i];

        int id = static_cast<int>(out.nodes.size());
        out.nodes.emplace_back();
        out.nodes[id].leaf = pos > neg ? Label::Positive : Label::Negative;

        bool depth_left = hp.tree_max_depth == 0 || depth < hp.tree_max_depth;
        if (pos == 0 || neg == 0 || !depth_left) return id;

        const std::size_t w = data.rows.front().size();
        int best = -1;
        double best_impurity = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < w; ++j) {
            double lp = 0, ln = 0;
            for (auto i : idx)
                if (data.rows[i][j] <= 0.5) (data.labels[i] == Label::Positive ? lp : ln) += data.weights[i];
            double rp = pos - lp, rn = neg - ln;
            double nl = lp + ln, nr = rp + rn;
            if (nl < hp.tree_min_leaf || nr < hp.tree_min_leaf) continue;
            double impurity = (nl * gini(lp, ln) + nr * gini(rp, rn)) / (nl + nr);
            if (impurity < best_impurity) {
                best_impurity = impurity;
                best = static_cast<int>(j);
            }
        }
        if (best < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto i : idx) (data.rows[i][best] <= 0.5 ? left : right).push_back(i);
        int l = grow(left, depth + 1);
        int r = grow(right, depth + 1);
        out.nodes[id].feature = best;
        out.nodes[id].left = l;
        out.nodes[id].right = r;
        return id;
    }
};

}  // namespace

TreeParams fit_tree(const LabeledData& data, const Hyperparameters& hp) {
    WeightedRows rows = collapse(data);
    Builder b{rows, hp, {}};
    std::vector<std::size_t> all(rows.rows.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    b.grow(all, 0);
    return std::move(b.out);
}

Label tree_predict(const TreeParams& p, const std::vector<double>& x) {
    int n = 0;
    while (p.nodes[n].feature >= 0) {
        const auto& node = p.nodes[n];
        n = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return p.nodes[n].leaf;
}

}  // namespace agml::detail

namespace agml {

int TreeParams::depth() const {
    if (nodes.empty()) return 0;
    std::vector<int> d(nodes.size(), 0);
    int deepest = 0;
    // Children are always appended after their parent.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].feature < 0) continue;
        d[nodes[i].left] = d[nodes[i].right] = d[i] + 1;
        deepest = std::max(deepest, d[i] + 1);
    }
    return deepest;
}

}  // namespace agml
