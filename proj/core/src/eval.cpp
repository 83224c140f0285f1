#include "agml/eval.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "agml/errors.hpp"

namespace agml {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
}

ConfusionMatrix confusion(const std::vector<Label>& predictions, const std::vector<Label>& labels) {
    if (predictions.size() != labels.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) +
                                                   " predictions for " +
                                                   std::to_string(labels.size()) + " labels");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == Label::Unlabeled || predictions[i] == Label::Unlabeled)
            throw Error(ErrorCode::InvalidArgument, "confusion needs +1/-1 values");
        bool p = predictions[i] == Label::Positive, y = labels[i] == Label::Positive;
        if (p && y) ++m.tp;
        else if (p) ++m.fp;
        else if (y) ++m.fn;
        else ++m.tn;
    }
    return m;
}

MetricsReport metrics(const ConfusionMatrix& m) {
    auto ratio = [](double num, double den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return num / den;
    };
    const double tp = static_cast<double>(m.tp), fp = static_cast<double>(m.fp),
                 fn = static_cast<double>(m.fn), tn = static_cast<double>(m.tn);
    MetricsReport r;
    r.matrix = m;
    r.npv = ratio(tn, tn + fn);
    r.precision = ratio(tp, tp + fp);
    r.recall = ratio(tp, tp + fn);
    // Harmonic mean of precision and recall, written so that P = R = 0 gives 0.
    r.f1 = ratio(2 * tp, 2 * tp + fp + fn);
    r.accuracy = ratio(tp + tn, tp + fp + fn + tn);
    double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (den > 0) r.mcc = (tp * tn - fp * fn) / std::sqrt(den);
    return r;
}

CvReport cross_validate(const ClassifierSpec& spec, const LabeledData& train, const FoldPlan& folds) {
    if (folds.assignments.size() != train.size())
        throw Error(ErrorCode::LengthMismatch, "fold plan covers " +
                                                   std::to_string(folds.assignments.size()) +
                                                   " samples, training set has " +
                                                   std::to_string(train.size()));
    CvReport out;
    out.folds = folds.k;

    struct Acc {
        double sum = 0;
        std::size_t n = 0;
    };
    std::map<std::string, Acc> acc;
    auto add = [&](const char* name, const std::optional<double>& v) {
        if (v) {
            acc[name].sum += *v;
            ++acc[name].n;
        } else {
            ++out.undefined[name];
        }
    };

    for (std::size_t f = 0; f < folds.k; ++f) {
        LabeledData fit_part = train.subset(folds.complement(f));
        LabeledData held = train.subset(folds.fold_members(f));
        TrainedModel model = fit(spec, fit_part);
        ++out.fits;
        ConfusionMatrix m = confusion(model.predict(held.rows), held.labels);
        out.mean.matrix += m;
        MetricsReport r = metrics(m);
        add("npv", r.npv);
        add("precision", r.precision);
        add("recall", r.recall);
        add("f1", r.f1);
        add("mcc", r.mcc);
        add("accuracy", r.accuracy);
    }

    auto mean = [&](const char* name) -> std::optional<double> {
        auto it = acc.find(name);
        if (it == acc.end() || it->second.n == 0) return std::nullopt;
        return it->second.sum / static_cast<double>(it->second.n);
    };
    out.mean.npv = mean("npv");
    out.mean.precision = mean("precision");
    out.mean.recall = mean("recall");
    out.mean.f1 = mean("f1");
    out.mean.mcc = mean("mcc");
    out.mean.accuracy = mean("accuracy");
    return out;
}

ResampleChoice select_resample_n(const ClassifierSpec& spec, const LabeledData& train,
                                 const FoldPlan& folds, int n_min, int n_max) {
    if (n_min < kMinResample || n_max > kMaxResample || n_min > n_max)
        throw Error(ErrorCode::OutOfRange, "resample range [" + std::to_string(n_min) + ", " +
                                               std::to_string(n_max) + "]");
    ResampleChoice choice;
    choice.n = n_min;
    if (spec.kind == ClassifierKind::Csp) {
        ClassifierSpec s = spec;
        s.resample_n.reset();
        choice.cv = cross_validate(s, train, folds);
        choice.note = "resampling has no effect on set membership";
        return choice;
    }
    std::optional<double> best;
    for (int n = n_min; n <= n_max; ++n) {
        ClassifierSpec s = spec;
        s.resample_n = n;
        CvReport cv = cross_validate(s, train, folds);
        choice.npv_by_n.push_back(cv.mean.npv);
        if (n == n_min || (cv.mean.npv && (!best || *cv.mean.npv > *best))) {
            if (cv.mean.npv) best = cv.mean.npv;
            choice.n = n;
            choice.cv = std::move(cv);
        }
    }
    if (!best) choice.note = "NPV undefined for every n";
    return choice;
}

namespace {

auto spec_key(const ClassifierSpec& s) {
    return std::make_tuple(static_cast<int>(s.kind), s.hp.knn_k, s.hp.mlp_h1, s.hp.mlp_h2,
                           s.resample_n.value_or(0), s.seed);
}

// True when a ranks strictly before b.
bool better(const Candidate& a, const Candidate& b) {
    if (a.cv.npv.has_value() != b.cv.npv.has_value()) return a.cv.npv.has_value();
    if (a.cv.npv && *a.cv.npv != *b.cv.npv) return *a.cv.npv > *b.cv.npv;
    if (*a.cv.precision != *b.cv.precision) return *a.cv.precision > *b.cv.precision;
    return spec_key(a.spec) < spec_key(b.spec);
}

}  // namespace

std::map<Group, GroupSelection> select_ensemble(
    const std::map<Group, std::vector<Candidate>>& candidates, double precision_floor) {
    std::map<Group, GroupSelection> out;
    for (const auto& [group, list] : candidates) {
        GroupSelection sel;
        sel.group = group;
        const Candidate* best = nullptr;
        for (const auto& c : list) {
            if (!c.cv.precision || *c.cv.precision < precision_floor) {
                sel.excluded.push_back(c.spec.display_name());
                continue;
            }
            if (!best || better(c, *best)) best = &c;
        }
        if (!best)
            throw Error(ErrorCode::NoEligibleModel,
                        std::string(to_string(group)) + ": no candidate reaches precision " +
                            std::to_string(precision_floor));
        std::sort(sel.excluded.begin(), sel.excluded.end());
        sel.chosen = *best;
        out.emplace(group, std::move(sel));
    }
    return out;
}

EnsembleModel::EnsembleModel(std::map<Group, TrainedModel> models) : models_(std::move(models)) {
    for (Group g : kAllGroups)
        if (!models_.count(g))
            throw Error(ErrorCode::InvalidArgument,
                        "ensemble has no model for " + std::string(to_string(g)));
}

const TrainedModel& EnsembleModel::model(Group g) const { return models_.at(g); }

Label EnsembleModel::predict(const BranchSample& s) const {
    return model(s.group()).predict(std::vector<double>(s.features.begin(), s.features.end()));
}

ExploitReport predict_novel(const EnsembleModel& ensemble, const std::vector<BranchSample>& candidates) {
    ExploitReport report;
    for (Group g : kAllGroups) {
        report.candidates_by_group[g] = 0;
        report.positives_by_group[g] = 0;
    }
    for (const auto& s : candidates) {
        Group g = s.group();
        ++report.candidates_by_group[g];
        if (ensemble.predict(s) != Label::Positive) continue;
        ++report.positives_by_group[g];
        report.positives.push_back({s.src, s.dst, g, s.src_domain, s.dst_domain, s.features});
    }
    std::sort(report.positives.begin(), report.positives.end(),
              [](const PredictedExploit& a, const PredictedExploit& b) {
                  return std::tie(a.group, a.src, a.dst, a.src_domain, a.dst_domain) <
                         std::tie(b.group, b.src, b.dst, b.src_domain, b.dst_domain);
              });
    report.candidates = candidates.size();
    if (report.candidates)
        report.reduction = 1.0 - static_cast<double>(report.positives.size()) /
                                     static_cast<double>(report.candidates);
    return report;
}

}  // namespace agml
