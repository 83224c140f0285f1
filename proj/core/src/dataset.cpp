#include "agml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "agml/errors.hpp"
#include "rng.hpp"

namespace agml {

std::string_view to_string(Origin o) {
    switch (o) {
        case Origin::ExistingEdge: return "existing-edge";
        case Origin::CandidateIntra: return "candidate-intra";
        case Origin::CandidateInter: return "candidate-inter";
    }
    return "?";
}

int to_int(Label l) { return static_cast<int>(l); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return detail::splitmix64(base ^ detail::splitmix64(stream));
}

NodeFeatures encode_node(const OperationDef& op, const AttackGraph& graph) {
    if (!graph.has_node(op.id))
        throw Error(ErrorCode::NodeNotInGraph,
                    op.id + " is not a node of the " + std::string(to_string(graph.domain())) +
                        " graph");
    NodeFeatures f = op.features;
    f[kHeadFeature] = graph.in_degree(op.id) == 0 ? 1 : 0;
    f[kTailFeature] = graph.out_degree(op.id) == 0 ? 1 : 0;
    return f;
}

namespace {

BranchFeatures concat(const NodeFeatures& a, const NodeFeatures& b) {
    BranchFeatures out{};
    std::copy(a.begin(), a.end(), out.begin());
    std::copy(b.begin(), b.end(), out.begin() + kNodeFeatureCount);
    return out;
}

const OperationDef& lookup(const OperationTable& ops, const std::string& id) {
    auto it = ops.find(id);
    if (it == ops.end()) throw Error(ErrorCode::UnknownOperation, id);
    return it->second;
}

}  // namespace

BranchFeatures encode_branch(const OperationDef& src, const AttackGraph& src_graph,
                             const OperationDef& dst, const AttackGraph& dst_graph) {
    return concat(encode_node(src, src_graph), encode_node(dst, dst_graph));
}

std::vector<BranchSample> generate_candidates(const std::vector<AttackGraph>& graphs,
                                              const OperationTable& ops, CandidateMode mode) {
    std::vector<const AttackGraph*> order;
    for (const auto& g : graphs) order.push_back(&g);
    std::stable_sort(order.begin(), order.end(), [](const AttackGraph* a, const AttackGraph* b) {
        return a->domain() < b->domain();
    });

    std::vector<std::map<std::string, NodeFeatures>> feats(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        for (const auto& n : order[i]->nodes())
            feats[i][n] = encode_node(lookup(ops, n), *order[i]);

    std::vector<BranchSample> out;
    auto emit = [&](std::size_t gi, const std::string& u, std::size_t gj, const std::string& v,
                    Origin origin) {
        BranchSample s;
        s.src = u;
        s.dst = v;
        s.src_domain = order[gi]->domain();
        s.dst_domain = order[gj]->domain();
        s.features = concat(feats[gi].at(u), feats[gj].at(v));
        s.origin = origin;
        s.label = origin == Origin::ExistingEdge ? Label::Positive : Label::Unlabeled;
        out.push_back(std::move(s));
    };

    if (mode != CandidateMode::Inter) {
        for (std::size_t gi = 0; gi < order.size(); ++gi) {
            const auto& g = *order[gi];
            for (const auto& u : g.nodes())
                for (const auto& v : g.nodes()) {
                    if (u == v) continue;
                    emit(gi, u, gi, v,
                         g.has_edge(u, v) ? Origin::ExistingEdge : Origin::CandidateIntra);
                }
        }
    }
    if (mode != CandidateMode::Intra) {
        auto share_graph = [&](const std::string& u, const std::string& v) {
            return std::any_of(order.begin(), order.end(), [&](const AttackGraph* g) {
                return g->has_node(u) && g->has_node(v);
            });
        };
        for (std::size_t gi = 0; gi < order.size(); ++gi)
            for (std::size_t gj = 0; gj < order.size(); ++gj) {
                if (gi == gj) continue;
                for (const auto& u : order[gi]->nodes())
                    for (const auto& v : order[gj]->nodes()) {
                        if (u == v || share_graph(u, v)) continue;
                        emit(gi, u, gj, v, Origin::CandidateInter);
                    }
            }
    }
    return out;
}

LabelTable parse_label_table(std::string_view csv) {
    LabelTable table;
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (lineno == 1 && line.rfind("src,", 0) == 0) continue;
        std::vector<std::string> cols;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cols.push_back(c);
        if (cols.size() != 3) throw MalformedInput(lineno, "expected src,dst,label");
        Label l;
        if (cols[2] == "+1" || cols[2] == "1") {
            l = Label::Positive;
        } else if (cols[2] == "-1") {
            l = Label::Negative;
        } else {
            throw MalformedInput(lineno, "label must be +1 or -1, found " + cols[2]);
        }
        auto [it, inserted] = table.emplace(PairKey(cols[0], cols[1]), l);
        if (!inserted && it->second != l)
            throw MalformedInput(lineno, "conflicting labels for " + cols[0] + "," + cols[1]);
    }
    return table;
}

LabelTable load_label_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_label_table(ss.str());
}

std::string format_label_table(const LabelTable& table) {
    std::string out = "src,dst,label\n";
    for (const auto& [k, l] : table)
        out += k.first + "," + k.second + "," + (l == Label::Positive ? "+1" : "-1") + "\n";
    return out;
}

LabelReport apply_labels(std::vector<BranchSample>& samples, const LabelTable& table) {
    LabelReport report;
    std::set<PairKey> matched, conflicts;
    for (auto& s : samples) {
        PairKey key(s.src, s.dst);
        auto it = table.find(key);
        if (it != table.end()) {
            matched.insert(key);
            if (s.origin == Origin::ExistingEdge) {
                if (it->second != Label::Positive) conflicts.insert(key);
            } else {
                s.label = it->second;
            }
        }
        if (s.label != Label::Unlabeled) ++report.labeled;
    }
    report.conflicts.assign(conflicts.begin(), conflicts.end());
    for (const auto& [k, l] : table)
        if (!matched.count(k)) report.unknown_pairs.push_back(k);
    return report;
}

DatasetSplit split_train_test(const std::vector<BranchSample>& samples, double ratio,
                              std::uint64_t seed) {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw Error(ErrorCode::OutOfRange, "split ratio must lie in [0, 1]");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        switch (samples[i].label) {
            case Label::Positive: pos.push_back(i); break;
            case Label::Negative: neg.push_back(i); break;
            case Label::Unlabeled:
                throw Error(ErrorCode::InvalidArgument,
                            "cannot split unlabeled sample " + samples[i].src + "->" +
                                samples[i].dst);
        }
    }
    if (pos.size() < 2 || neg.size() < 2)
        throw Error(ErrorCode::TooFewSamples, "each class needs at least 2 samples (have " +
                                                  std::to_string(pos.size()) + " positive, " +
                                                  std::to_string(neg.size()) + " negative)");

    std::mt19937_64 rng(seed);
    std::vector<char> in_train(samples.size(), 0);
    for (auto* cls : {&pos, &neg}) {
        detail::shuffle(*cls, rng);
        auto n = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(cls->size())));
        for (std::size_t i = 0; i < n; ++i) in_train[(*cls)[i]] = 1;
    }

    DatasetSplit split;
    split.seed = seed;
    split.ratio = ratio;
    for (std::size_t i = 0; i < samples.size(); ++i)
        (in_train[i] ? split.train : split.test).push_back(samples[i]);
    if (split.train.empty()) throw Error(ErrorCode::TooFewSamples, "training split is empty");
    if (split.test.empty()) throw Error(ErrorCode::TooFewSamples, "test split is empty");
    return split;
}

std::vector<std::size_t> FoldPlan::fold_members(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::complement(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

FoldPlan stratified_folds(const std::vector<Label>& labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "fold count must be at least 2");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == Label::Positive) {
            pos.push_back(i);
        } else if (labels[i] == Label::Negative) {
            neg.push_back(i);
        } else {
            throw Error(ErrorCode::InvalidArgument, "fold labels must be +1 or -1");
        }
    }
    if (pos.size() < k || neg.size() < k)
        throw Error(ErrorCode::TooFewSamples, "each class needs at least k=" + std::to_string(k) +
                                                  " samples");
    std::mt19937_64 rng(seed);
    detail::shuffle(pos, rng);
    detail::shuffle(neg, rng);

    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(labels.size(), 0);
    for (std::size_t i = 0; i < pos.size(); ++i) plan.assignments[pos[i]] = i % k;
    // Continue the rotation so the larger folds of each class do not pile up.
    for (std::size_t i = 0; i < neg.size(); ++i) plan.assignments[neg[i]] = (pos.size() + i) % k;
    return plan;
}

FoldPlan stratified_folds(const std::vector<BranchSample>& train, std::size_t k,
                          std::uint64_t seed) {
    std::vector<Label> labels;
    labels.reserve(train.size());
    for (const auto& s : train) labels.push_back(s.label);
    return stratified_folds(labels, k, seed);
}

std::vector<BranchSample> resample_positives(const std::vector<BranchSample>& train, int n) {
    if (n < kMinResample || n > kMaxResample)
        throw Error(ErrorCode::OutOfRange, "resample n=" + std::to_string(n) + " outside [3, 12]");
    std::vector<BranchSample> out = train;
    for (int pass = 1; pass < n; ++pass)
        for (const auto& s : train)
            if (s.label == Label::Positive) out.push_back(s);
    return out;
}

std::string format_dataset_csv(const std::vector<BranchSample>& samples) {
    std::string out = "src,dst,group";
    for (std::size_t i = 0; i < kBranchFeatureCount; ++i) out += ",f" + std::to_string(i);
    out += ",label,origin\n";
    for (const auto& s : samples) {
        out += s.src + "," + s.dst + "," + std::string(to_string(s.group()));
        for (auto b : s.features) {
            out += ',';
            out += b ? '1' : '0';
        }
        out += "," + std::to_string(to_int(s.label)) + "," + std::string(to_string(s.origin)) + "\n";
    }
    return out;
}

}  // namespace agml
