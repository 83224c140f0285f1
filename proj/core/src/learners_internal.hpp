#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "agml/learners.hpp"

namespace agml::detail {

bool is_binary(const std::vector<double>& x);
// Bit i set iff x[i] == 1. Only meaningful for binary rows of width <= 64.
std::uint64_t pack_bits(const std::vector<double>& x);
double squared_distance(const std::vector<double>& a, const std::vector<double>& b);

// Distinct rows with per-row counts, in first-occurrence order.
struct WeightedRows {
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    std::vector<double> weights;
};
WeightedRows collapse(const LabeledData& data);

CspParams fit_csp(const LabeledData& data);

NbParams fit_nb(const LabeledData& data, const Hyperparameters& hp);
double nb_log_odds(const NbParams& p, const std::vector<double>& x);

TreeParams fit_tree(const LabeledData& data, const Hyperparameters& hp);
Label tree_predict(const TreeParams& p, const std::vector<double>& x);

struct KnnIndex {
    struct Entry {
        std::vector<double> point;
        std::uint64_t bits = 0;
        std::vector<std::size_t> occurrences;  // ascending training indices
    };
    std::vector<Entry> entries;
    bool packed = false;
};
KnnIndex build_knn_index(const KnnParams& p);
Label knn_predict(const KnnParams& p, const KnnIndex& index, const std::vector<double>& x);

SvmParams fit_svm(const LabeledData& data, const Hyperparameters& hp);
double svm_decision(const SvmParams& p, const std::vector<double>& x);

MlpParams init_mlp(std::size_t in, std::size_t h1, std::size_t h2, std::uint64_t seed);
MlpParams fit_mlp(const LabeledData& data, const Hyperparameters& hp, std::uint64_t seed);

}  // namespace agml::detail
