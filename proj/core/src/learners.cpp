#include "agml/learners.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "agml/errors.hpp"
#include "learners_internal.hpp"

namespace agml {

std::string_view to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::GaussianNb: return "gaussian-nb";
        case ClassifierKind::DecisionTree: return "decision-tree";
        case ClassifierKind::Knn: return "knn";
        case ClassifierKind::SvmRbf: return "svm-rbf";
        case ClassifierKind::Mlp: return "mlp";
        case ClassifierKind::Csp: return "csp";
    }
    return "?";
}

std::optional<ClassifierKind> parse_kind(std::string_view name) {
    for (auto k : kAllKinds)
        if (to_string(k) == name) return k;
    return std::nullopt;
}

std::string ClassifierSpec::display_name() const {
    switch (kind) {
        case ClassifierKind::GaussianNb: return "NB";
        case ClassifierKind::DecisionTree: return "DT";
        case ClassifierKind::Knn: return "kNN (k=" + std::to_string(hp.knn_k) + ")";
        case ClassifierKind::SvmRbf: return "SVM";
        case ClassifierKind::Mlp:
            return "MLP (" + std::to_string(hp.mlp_h1) + "," + std::to_string(hp.mlp_h2) + ")";
        case ClassifierKind::Csp: return "CSP";
    }
    return "?";
}

void ClassifierSpec::check() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
    if (resample_n && (*resample_n < kMinResample || *resample_n > kMaxResample))
        throw Error(ErrorCode::OutOfRange, "resample n=" + std::to_string(*resample_n));
    if (hp.knn_k < 1) bad("knn k must be >= 1");
    if (hp.mlp_h1 < 1 || hp.mlp_h2 < 1) bad("mlp hidden sizes must be >= 1");
    if (hp.mlp_epochs < 0) bad("mlp epochs must be >= 0");
    if (!(hp.mlp_learning_rate > 0)) bad("mlp learning rate must be positive");
    if (!(hp.svm_c > 0) || !(hp.svm_gamma > 0) || !(hp.svm_tolerance > 0)) bad("svm C, gamma, tolerance must be positive");
    if (hp.svm_max_passes < 1) bad("svm max passes must be >= 1");
    if (hp.tree_max_depth < 0 || hp.tree_min_leaf < 1) bad("tree depth/min leaf out of range");
    if (!(hp.nb_var_smoothing >= 0)) bad("nb variance smoothing must be >= 0");
}

ClassifierSpec make_spec(ClassifierKind kind, std::uint64_t seed) {
    ClassifierSpec s;
    s.kind = kind;
    s.seed = seed;
    return s;
}

ClassifierSpec make_mlp_spec(int h1, int h2, std::uint64_t seed) {
    ClassifierSpec s = make_spec(ClassifierKind::Mlp, seed);
    s.hp.mlp_h1 = h1;
    s.hp.mlp_h2 = h2;
    return s;
}

void LabeledData::add(std::vector<double> row, Label label) {
    if (rows.empty() && width == 0) width = row.size();
    if (row.size() != width)
        throw Error(ErrorCode::WidthMismatch, "row width " + std::to_string(row.size()) +
                                                  " != " + std::to_string(width));
    rows.push_back(std::move(row));
    labels.push_back(label);
}

LabeledData LabeledData::subset(const std::vector<std::size_t>& indices) const {
    LabeledData out;
    out.width = width;
    out.rows.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (auto i : indices) {
        out.rows.push_back(rows.at(i));
        out.labels.push_back(labels.at(i));
    }
    return out;
}

std::size_t LabeledData::count(Label l) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

std::vector<std::vector<double>> to_rows(const std::vector<BranchSample>& samples) {
    std::vector<std::vector<double>> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) rows.emplace_back(s.features.begin(), s.features.end());
    return rows;
}

LabeledData to_labeled_data(const std::vector<BranchSample>& samples) {
    LabeledData d;
    d.width = kBranchFeatureCount;
    d.rows = to_rows(samples);
    for (const auto& s : samples) d.labels.push_back(s.label);
    return d;
}

LabeledData resample_positives(const LabeledData& data, int n) {
    if (n < kMinResample || n > kMaxResample)
        throw Error(ErrorCode::OutOfRange, "resample n=" + std::to_string(n) + " outside [3, 12]");
    LabeledData out = data;
    for (int pass = 1; pass < n; ++pass)
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data.labels[i] == Label::Positive) {
                out.rows.push_back(data.rows[i]);
                out.labels.push_back(Label::Positive);
            }
    return out;
}

namespace detail {

bool is_binary(const std::vector<double>& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

std::uint64_t pack_bits(const std::vector<double>& x) {
    std::uint64_t b = 0;
    for (std::size_t i = 0; i < x.size() && i < 64; ++i)
        if (x[i] == 1.0) b |= std::uint64_t{1} << i;
    return b;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

WeightedRows collapse(const LabeledData& data) {
    WeightedRows out;
    std::map<std::pair<std::vector<double>, Label>, std::size_t> seen;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto [it, inserted] = seen.emplace(std::make_pair(data.rows[i], data.labels[i]),
                                           out.rows.size());
        if (inserted) {
            out.rows.push_back(data.rows[i]);
            out.labels.push_back(data.labels[i]);
            out.weights.push_back(1.0);
        } else {
            out.weights[it->second] += 1.0;
        }
    }
    return out;
}

CspParams fit_csp(const LabeledData& data) {
    CspParams p;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data.labels[i] == Label::Positive) p.positives.insert(data.rows[i]);
    return p;
}

}  // namespace detail

struct TrainedModel::Index {
    detail::KnnIndex knn;
    // Binary support vectors: kernel value by Hamming distance.
    std::vector<std::uint64_t> support_bits;
    std::array<double, 65> kernel_table{};
    bool support_packed = false;

    double svm_decision(const SvmParams& p, const std::vector<double>& x) const {
        if (!support_packed || !detail::is_binary(x)) return detail::svm_decision(p, x);
        const std::uint64_t xb = detail::pack_bits(x);
        double s = p.bias;
        for (std::size_t i = 0; i < support_bits.size(); ++i)
            s += p.coef[i] * kernel_table[std::popcount(support_bits[i] ^ xb)];
        return s;
    }
};

TrainedModel::TrainedModel(ClassifierSpec spec, std::size_t width, ModelParams params)
    : spec_(std::move(spec)), width_(width), params_(std::move(params)) {
    build_index();
}

void TrainedModel::build_index() {
    auto idx = std::make_shared<Index>();
    if (auto* k = std::get_if<KnnParams>(&params_)) idx->knn = detail::build_knn_index(*k);
    if (auto* sv = std::get_if<SvmParams>(&params_)) {
        idx->support_packed = width_ <= 64 && std::all_of(sv->support.begin(), sv->support.end(),
                                                          detail::is_binary);
        if (idx->support_packed) {
            for (const auto& r : sv->support) idx->support_bits.push_back(detail::pack_bits(r));
            for (std::size_t d = 0; d <= 64; ++d)
                idx->kernel_table[d] = std::exp(-sv->gamma * static_cast<double>(d));
        }
    }
    index_ = std::move(idx);
}

Label TrainedModel::predict(const std::vector<double>& x) const {
    if (x.size() != width_)
        throw Error(ErrorCode::WidthMismatch, "model expects " + std::to_string(width_) +
                                                  " features, got " + std::to_string(x.size()));
    return std::visit(
        [&](const auto& p) -> Label {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, NbParams>) {
                return detail::nb_log_odds(p, x) > 0 ? Label::Positive : Label::Negative;
            } else if constexpr (std::is_same_v<P, TreeParams>) {
                return detail::tree_predict(p, x);
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                return detail::knn_predict(p, index_->knn, x);
            } else if constexpr (std::is_same_v<P, SvmParams>) {
                return index_->svm_decision(p, x) > 0 ? Label::Positive : Label::Negative;
            } else if constexpr (std::is_same_v<P, MlpParams>) {
                return p.output(x) >= 0.5 ? Label::Positive : Label::Negative;
            } else {
                return p.positives.count(x) ? Label::Positive : Label::Negative;
            }
        },
        params_);
}

std::vector<Label> TrainedModel::predict(const std::vector<std::vector<double>>& rows) const {
    std::vector<Label> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(predict(r));
    return out;
}

double TrainedModel::score(const std::vector<double>& x) const {
    if (x.size() != width_) throw Error(ErrorCode::WidthMismatch, "score width");
    if (auto* p = std::get_if<NbParams>(&params_)) return detail::nb_log_odds(*p, x);
    if (auto* p = std::get_if<SvmParams>(&params_)) return index_->svm_decision(*p, x);
    if (auto* p = std::get_if<MlpParams>(&params_)) return p->output(x);
    return predict(x) == Label::Positive ? 1.0 : 0.0;
}

TrainedModel fit(const ClassifierSpec& spec, const LabeledData& train) {
    spec.check();
    if (train.size() == 0) throw Error(ErrorCode::TooFewSamples, "empty training set");
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (train.rows[i].size() != train.width)
            throw Error(ErrorCode::WidthMismatch, "training row " + std::to_string(i));
        if (!detail::is_binary(train.rows[i]))
            throw Error(ErrorCode::NonBinaryFeature, "training row " + std::to_string(i) +
                                                         " has a value other than 0/1");
        if (train.labels[i] == Label::Unlabeled)
            throw Error(ErrorCode::InvalidArgument, "training row " + std::to_string(i) +
                                                        " is unlabeled");
    }

    LabeledData data = spec.resample_n ? resample_positives(train, *spec.resample_n) : train;

    if (spec.kind != ClassifierKind::Csp &&
        (data.count(Label::Positive) == 0 || data.count(Label::Negative) == 0))
        throw Error(ErrorCode::SingleClassTraining,
                    std::string(to_string(spec.kind)) + " needs both classes");

    switch (spec.kind) {
        case ClassifierKind::GaussianNb:
            return TrainedModel(spec, data.width, detail::fit_nb(data, spec.hp));
        case ClassifierKind::DecisionTree:
            return TrainedModel(spec, data.width, detail::fit_tree(data, spec.hp));
        case ClassifierKind::Knn:
            return TrainedModel(spec, data.width, KnnParams{spec.hp.knn_k, data.rows, data.labels});
        case ClassifierKind::SvmRbf:
            return TrainedModel(spec, data.width, detail::fit_svm(data, spec.hp));
        case ClassifierKind::Mlp:
            return TrainedModel(spec, data.width, detail::fit_mlp(data, spec.hp, spec.seed));
        case ClassifierKind::Csp:
            return TrainedModel(spec, data.width, detail::fit_csp(data));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown classifier kind");
}

}  // namespace agml
