#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agml/corpus.hpp"
#include "agml/domain.hpp"
#include "agml/features.hpp"
#include "agml/graph.hpp"

namespace agml {

enum class Label : std::int8_t { Negative = -1, Unlabeled = 0, Positive = 1 };

enum class Origin { ExistingEdge, CandidateIntra, CandidateInter };

std::string_view to_string(Origin o);
int to_int(Label l);

struct BranchSample {
    std::string src;
    std::string dst;
    Domain src_domain = Domain::SdnCp;
    Domain dst_domain = Domain::SdnCp;
    BranchFeatures features{};
    Label label = Label::Unlabeled;
    Origin origin = Origin::CandidateIntra;

    Group group() const {
        return origin == Origin::CandidateInter ? Group::Inter : group_of(src_domain);
    }
};

/// Attribute and domain bits come from the operation; head/tail from its
/// position in `graph`. Throws NodeNotInGraph.
NodeFeatures encode_node(const OperationDef& op, const AttackGraph& graph);

BranchFeatures encode_branch(const OperationDef& src, const AttackGraph& src_graph,
                             const OperationDef& dst, const AttackGraph& dst_graph);

enum class CandidateMode { Intra, Inter, Both };

/// Intra: every ordered non-self pair inside one graph; existing edges are
/// emitted as labeled positives. Inter: ordered pairs (u in G1, v in G2),
/// G1 != G2, skipping pairs that already share some graph. Ordering is
/// (src domain, dst domain, src, dst), intra before inter.
std::vector<BranchSample> generate_candidates(const std::vector<AttackGraph>& graphs,
                                              const OperationTable& ops, CandidateMode mode);

using PairKey = std::pair<std::string, std::string>;
using LabelTable = std::map<PairKey, Label>;

// Reads `src,dst,label` CSV. Labels are +1/-1 (also accepts 1).
LabelTable parse_label_table(std::string_view csv);
LabelTable load_label_table(const std::string& path);
std::string format_label_table(const LabelTable& table);

struct LabelReport {
    std::vector<PairKey> conflicts;     // table said -1 for an existing edge
    std::vector<PairKey> unknown_pairs; // table keys matching no sample
    std::size_t labeled = 0;            // samples carrying a label afterwards, edges included
};

LabelReport apply_labels(std::vector<BranchSample>& samples, const LabelTable& table);

struct DatasetSplit {
    std::vector<BranchSample> train;
    std::vector<BranchSample> test;
    std::uint64_t seed = 0;
    double ratio = 0.85;
};

/// Per-class shuffle with mt19937_64(seed); round(ratio * class size) go to
/// train. Both outputs keep the input order.
DatasetSplit split_train_test(const std::vector<BranchSample>& samples, double ratio,
                              std::uint64_t seed);

struct FoldPlan {
    std::size_t k = 3;
    std::vector<std::size_t> assignments;  // sample index -> fold

    std::vector<std::size_t> fold_members(std::size_t fold) const;
    std::vector<std::size_t> complement(std::size_t fold) const;
};

FoldPlan stratified_folds(const std::vector<Label>& labels, std::size_t k, std::uint64_t seed);
FoldPlan stratified_folds(const std::vector<BranchSample>& train, std::size_t k,
                          std::uint64_t seed);

inline constexpr int kMinResample = 3;
inline constexpr int kMaxResample = 12;

/// The original list followed by n-1 further copies of every positive.
std::vector<BranchSample> resample_positives(const std::vector<BranchSample>& train, int n);

std::string format_dataset_csv(const std::vector<BranchSample>& samples);

// Independent per-stream seed from one base seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace agml
