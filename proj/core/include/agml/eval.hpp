#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agml/dataset.hpp"
#include "agml/learners.hpp"

namespace agml {

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o);
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(const std::vector<Label>& predictions, const std::vector<Label>& labels);

// std::nullopt marks a zero denominator.
struct MetricsReport {
    std::optional<double> npv, precision, recall, f1, mcc, accuracy;
    ConfusionMatrix matrix;
};

MetricsReport metrics(const ConfusionMatrix& m);

struct CvReport {
    MetricsReport mean;  // matrix holds the summed fold matrices
    std::size_t folds = 0;
    std::size_t fits = 0;
    // Folds whose value was undefined and left out of the mean.
    std::map<std::string, std::size_t> undefined;
};

CvReport cross_validate(const ClassifierSpec& spec, const LabeledData& train, const FoldPlan& folds);

struct ResampleChoice {
    int n = kMinResample;
    std::vector<std::optional<double>> npv_by_n;  // index n - n_min
    CvReport cv;                                  // at the chosen n
    std::string note;
};

/// Grid search over n in [n_min, n_max] by mean CV NPV; ties go to the
/// smaller n and undefined NPV ranks last.
ResampleChoice select_resample_n(const ClassifierSpec& spec, const LabeledData& train,
                                 const FoldPlan& folds, int n_min = kMinResample,
                                 int n_max = kMaxResample);

inline constexpr double kDefaultPrecisionFloor = 0.05;

struct Candidate {
    ClassifierSpec spec;
    MetricsReport cv;
};

struct GroupSelection {
    Group group = Group::SdnCp;
    Candidate chosen;
    // Excluded by the precision floor, by display name.
    std::vector<std::string> excluded;
};

/// Per group: precision >= floor (undefined precision is ineligible), then
/// max NPV, then higher precision, then kind order and smaller resample_n.
/// Throws NoEligibleModel.
std::map<Group, GroupSelection> select_ensemble(
    const std::map<Group, std::vector<Candidate>>& candidates,
    double precision_floor = kDefaultPrecisionFloor);

class EnsembleModel {
public:
    explicit EnsembleModel(std::map<Group, TrainedModel> models);

    const TrainedModel& model(Group g) const;
    const std::map<Group, TrainedModel>& models() const { return models_; }

    Label predict(const BranchSample& s) const;

private:
    std::map<Group, TrainedModel> models_;
};

struct PredictedExploit {
    std::string src;
    std::string dst;
    Group group = Group::SdnCp;
    Domain src_domain = Domain::SdnCp;
    Domain dst_domain = Domain::SdnCp;
    BranchFeatures features{};
};

struct ExploitReport {
    std::vector<PredictedExploit> positives;  // sorted by group, src, dst
    std::map<Group, std::size_t> candidates_by_group;
    std::map<Group, std::size_t> positives_by_group;
    std::size_t candidates = 0;
    std::optional<double> reduction;  // 1 - positives / candidates
};

ExploitReport predict_novel(const EnsembleModel& ensemble, const std::vector<BranchSample>& candidates);

}  // namespace agml
