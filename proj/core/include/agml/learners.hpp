#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "agml/dataset.hpp"

namespace agml {

enum class ClassifierKind { GaussianNb, DecisionTree, Knn, SvmRbf, Mlp, Csp };

inline constexpr std::array<ClassifierKind, 6> kAllKinds = {
    ClassifierKind::GaussianNb, ClassifierKind::DecisionTree, ClassifierKind::Knn,
    ClassifierKind::SvmRbf,     ClassifierKind::Mlp,          ClassifierKind::Csp};

std::string_view to_string(ClassifierKind k);
std::optional<ClassifierKind> parse_kind(std::string_view name);

struct Hyperparameters {
    double nb_var_smoothing = 1e-9;
    int tree_max_depth = 0;  // 0: unlimited
    int tree_min_leaf = 1;
    int knn_k = 3;
    double svm_c = 1.0;
    double svm_gamma = 1.0 / 38.0;
    double svm_tolerance = 1e-3;
    int svm_max_passes = 10000;
    int mlp_h1 = 5;
    int mlp_h2 = 2;
    double mlp_learning_rate = 0.01;
    int mlp_epochs = 2000;

    bool operator==(const Hyperparameters&) const = default;
};

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::Csp;
    Hyperparameters hp;
    std::optional<int> resample_n;
    std::uint64_t seed = 0;

    // "MLP (6,2)", "kNN (k=3)", ...
    std::string display_name() const;
    void check() const;

    bool operator==(const ClassifierSpec&) const = default;
};

ClassifierSpec make_spec(ClassifierKind kind, std::uint64_t seed = 0);
ClassifierSpec make_mlp_spec(int h1, int h2, std::uint64_t seed = 0);

/// Dense row-major feature matrix with {+1,-1} labels.
struct LabeledData {
    std::size_t width = 0;
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;

    std::size_t size() const { return rows.size(); }
    void add(std::vector<double> row, Label label);
    LabeledData subset(const std::vector<std::size_t>& indices) const;
    std::size_t count(Label l) const;
};

LabeledData to_labeled_data(const std::vector<BranchSample>& samples);
std::vector<std::vector<double>> to_rows(const std::vector<BranchSample>& samples);

// Same rule as resample_positives, on a plain matrix.
LabeledData resample_positives(const LabeledData& data, int n);

struct NbParams {
    // Index 0: negative class, 1: positive class.
    std::array<double, 2> prior{};
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> var;
    double epsilon = 0;

    bool operator==(const NbParams&) const = default;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.5;
    int left = -1;     // x[feature] <= threshold
    int right = -1;
    Label leaf = Label::Negative;

    bool operator==(const TreeNode&) const = default;
};

struct TreeParams {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int depth() const;

    bool operator==(const TreeParams&) const = default;
};

struct KnnParams {
    int k = 3;
    std::vector<std::vector<double>> points;
    std::vector<Label> labels;

    bool operator==(const KnnParams&) const = default;
};

struct SvmParams {
    double gamma = 0;
    double bias = 0;
    std::vector<std::vector<double>> support;
    std::vector<double> coef;  // alpha_i * y_i
    std::size_t iterations = 0;
    bool converged = true;

    bool operator==(const SvmParams&) const = default;
};

struct MlpParams {
    std::size_t in = 0, h1 = 0, h2 = 0;
    std::vector<double> w1;  // h1 x in
    std::vector<double> b1;
    std::vector<double> w2;  // h2 x h1
    std::vector<double> b2;
    std::vector<double> w3;  // h2
    double b3 = 0;
    double final_loss = 0;

    std::size_t parameter_count() const;
    // Flat view in the order w1, b1, w2, b2, w3, b3.
    std::vector<double*> parameters();
    double output(const std::vector<double>& x) const;

    bool operator==(const MlpParams&) const = default;
};

struct CspParams {
    std::set<std::vector<double>> positives;

    bool operator==(const CspParams&) const = default;
};

using ModelParams = std::variant<NbParams, TreeParams, KnnParams, SvmParams, MlpParams, CspParams>;

class TrainedModel {
public:
    TrainedModel(ClassifierSpec spec, std::size_t width, ModelParams params);

    const ClassifierSpec& spec() const { return spec_; }
    std::size_t width() const { return width_; }
    const ModelParams& params() const { return params_; }

    Label predict(const std::vector<double>& x) const;
    std::vector<Label> predict(const std::vector<std::vector<double>>& rows) const;

    // Posterior log-odds for NB, decision value for SVM, output for MLP.
    // Unused for the other kinds.
    double score(const std::vector<double>& x) const;

private:
    struct Index;
    void build_index();

    ClassifierSpec spec_;
    std::size_t width_;
    ModelParams params_;
    std::shared_ptr<const Index> index_;
};

/// Trains one classifier. Positives are resampled first when the spec
/// carries resample_n. Training features must be 0/1 (NonBinaryFeature);
/// discriminative kinds need both classes (SingleClassTraining).
TrainedModel fit(const ClassifierSpec& spec, const LabeledData& train);

// Relative error |a - n| / max(|a|, |n|, 1e-6), maximised over all weights.
double gradient_check(const TrainedModel& model, const std::vector<double>& x, Label y,
                      double epsilon = 1e-5);
double gradient_check(const MlpParams& params, const std::vector<double>& x, Label y,
                      double epsilon = 1e-5);

inline constexpr int kModelFormatVersion = 1;

std::string save_model(const TrainedModel& model);
TrainedModel load_model(std::string_view bytes);

namespace detail {

struct MlpGradient {
    double loss = 0;
    std::vector<double> grad;  // same order as MlpParams::parameters()
};

// Single-sample BCE loss and gradient. `fault` negates the hidden-layer
// ReLU term for mutation testing of the checker.
MlpGradient mlp_gradient(const MlpParams& p, const std::vector<double>& x, double target,
                         bool fault = false);

double gradient_check(const MlpParams& params, const std::vector<double>& x, Label y,
                      double epsilon, bool fault);

std::string spec_to_json(const ClassifierSpec& spec);
ClassifierSpec spec_from_json(std::string_view text);

}  // namespace detail

}  // namespace agml
