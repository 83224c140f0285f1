#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "agml/errors.hpp"
#include "agml/eval.hpp"
#include "fixtures.hpp"

namespace agml {
namespace {

constexpr Label P = Label::Positive;
constexpr Label N = Label::Negative;

TEST(Confusion, Examples) {
    EXPECT_EQ(confusion({P, P, N, N}, {P, N, P, N}), (ConfusionMatrix{1, 1, 1, 1}));
    EXPECT_EQ(confusion({N, N}, {N, N}), (ConfusionMatrix{0, 0, 0, 2}));
    EXPECT_EQ(confusion({}, {}), ConfusionMatrix{});
}

TEST(Confusion, Errors) {
    EXPECT_THROW(confusion({P}, {P, N}), Error);
    EXPECT_THROW(confusion({Label::Unlabeled}, {P}), Error);
}

TEST(Metrics, ReferenceMatrix) {
    auto r = metrics(test::kReferenceMatrix);
    EXPECT_EQ(test::kReferenceMatrix.total(), 1625u);
    EXPECT_NEAR(*r.npv, 0.9902, 5e-5);
    EXPECT_NEAR(*r.precision, 0.2796, 5e-5);
    EXPECT_NEAR(*r.recall, 0.6341, 5e-5);
    EXPECT_NEAR(*r.accuracy, 0.9495, 5e-5);
    EXPECT_NEAR(*r.mcc, 0.3996, 5e-5);
    // 2PR/(P+R) with the values above
    EXPECT_NEAR(*r.f1, 0.3881, 5e-5);
}

TEST(Metrics, HandComputed) {
    auto r = metrics({3, 1, 2, 4});
    EXPECT_DOUBLE_EQ(*r.npv, 4.0 / 6.0);
    EXPECT_DOUBLE_EQ(*r.precision, 0.75);
    EXPECT_DOUBLE_EQ(*r.recall, 0.6);
    EXPECT_DOUBLE_EQ(*r.accuracy, 0.7);
    EXPECT_NEAR(*r.mcc, (12.0 - 2.0) / std::sqrt(4.0 * 5 * 5 * 6), 1e-15);
}

TEST(Metrics, UndefinedMarkers) {
    auto no_pred_pos = metrics({0, 0, 3, 5});
    EXPECT_FALSE(no_pred_pos.precision);
    EXPECT_FALSE(no_pred_pos.mcc);
    EXPECT_DOUBLE_EQ(*no_pred_pos.f1, 0.0);
    auto no_pred_neg = metrics({4, 2, 0, 0});
    EXPECT_FALSE(no_pred_neg.npv);
    auto empty = metrics({});
    EXPECT_FALSE(empty.accuracy);
    EXPECT_FALSE(empty.f1);
}

// Property: metric identities on random matrices.
TEST(EvalProperties, MetricIdentities) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<std::size_t> cell(0, 50);
    for (int t = 0; t < 1000; ++t) {
        ConfusionMatrix m{cell(rng), cell(rng), cell(rng), cell(rng)};
        auto r = metrics(m);
        for (const auto& v : {r.npv, r.precision, r.recall, r.f1, r.accuracy})
            if (v) {
                EXPECT_GE(*v, 0.0);
                EXPECT_LE(*v, 1.0);
            }
        if (r.mcc) {
            EXPECT_GE(*r.mcc, -1.0 - 1e-12);
            EXPECT_LE(*r.mcc, 1.0 + 1e-12);
        }
        if (r.precision && r.recall && *r.precision + *r.recall > 0)
            EXPECT_NEAR(*r.f1, 2 * *r.precision * *r.recall / (*r.precision + *r.recall), 1e-12);
        if (m.total() > 0)
            EXPECT_NEAR(*r.accuracy, double(m.tp + m.tn) / double(m.total()), 1e-15);
    }
}

TEST(EvalProperties, PerfectAndInvertedMcc) {
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<std::size_t> cell(1, 50);
    for (int t = 0; t < 100; ++t) {
        std::size_t a = cell(rng), b = cell(rng);
        EXPECT_NEAR(*metrics({a, 0, 0, b}).mcc, 1.0, 1e-12);
        EXPECT_NEAR(*metrics({0, a, b, 0}).mcc, -1.0, 1e-12);
    }
}

LabeledData separable(std::size_t n) {
    LabeledData d;
    d.width = 3;
    for (std::size_t i = 0; i < n; ++i) {
        bool pos = i % 3 == 0;
        d.add({pos ? 1.0 : 0.0, static_cast<double>(i % 2), pos ? 0.0 : 1.0}, pos ? P : N);
    }
    return d;
}

TEST(CrossValidate, SeparableData) {
    auto d = separable(30);
    auto folds = stratified_folds(d.labels, 3, 1);
    auto cv = cross_validate(make_spec(ClassifierKind::DecisionTree), d, folds);
    EXPECT_EQ(cv.fits, 3u);
    EXPECT_EQ(cv.folds, 3u);
    EXPECT_DOUBLE_EQ(*cv.mean.accuracy, 1.0);
    EXPECT_DOUBLE_EQ(*cv.mean.npv, 1.0);
    EXPECT_EQ(cv.mean.matrix.total(), 30u);
}

TEST(CrossValidate, UndefinedFoldsAreCounted) {
    auto d = separable(30);
    // CSP trained without positives never predicts +1
    LabeledData neg;
    neg.width = d.width;
    FoldPlan plan{3, {}};
    for (std::size_t i = 0; i < d.size(); ++i) {
        neg.add(d.rows[i], N);
        plan.assignments.push_back(i % 3);
    }
    auto cv = cross_validate(make_spec(ClassifierKind::Csp), neg, plan);
    EXPECT_FALSE(cv.mean.precision);
    EXPECT_EQ(cv.undefined.at("precision"), 3u);
    EXPECT_THROW(cross_validate(make_spec(ClassifierKind::Csp), d, FoldPlan{3, {0, 1}}), Error);
}

TEST(SelectResample, CspSkipsTheGrid) {
    auto d = separable(30);
    auto folds = stratified_folds(d.labels, 3, 2);
    auto c = select_resample_n(make_spec(ClassifierKind::Csp), d, folds);
    EXPECT_EQ(c.n, kMinResample);
    EXPECT_TRUE(c.npv_by_n.empty());
    EXPECT_FALSE(c.note.empty());
}

TEST(SelectResample, TiesGoToSmallestN) {
    // A separable set gives NPV 1 for every n.
    auto d = separable(30);
    auto folds = stratified_folds(d.labels, 3, 2);
    auto c = select_resample_n(make_spec(ClassifierKind::DecisionTree), d, folds, 3, 6);
    EXPECT_EQ(c.n, 3);
    EXPECT_EQ(c.npv_by_n.size(), 4u);
    EXPECT_EQ(c.cv.fits, 3u);
    EXPECT_THROW(select_resample_n(make_spec(ClassifierKind::DecisionTree), d, folds, 2, 6), Error);
}

TEST(SelectEnsemble, ReferenceGrid) {
    auto sel = select_ensemble(test::reference_candidates(), 0.05);
    for (const auto& [g, name] : test::reference_selection()) {
        EXPECT_EQ(sel.at(g).chosen.spec.display_name(), name) << to_string(g);
    }
    EXPECT_EQ(sel.at(Group::Inter).excluded, (std::vector<std::string>{"NB", "kNN (k=3)"}));
    EXPECT_TRUE(sel.at(Group::SdnCp).excluded.empty());
}

TEST(SelectEnsemble, ZeroFloorTakesThePerfectInterNpv) {
    auto sel = select_ensemble(test::reference_candidates(), 0.0);
    // NB and kNN tie at 1.0; kNN has the higher precision
    EXPECT_EQ(sel.at(Group::Inter).chosen.spec.display_name(), "kNN (k=3)");
}

// Property: input order does not change the choice.
TEST(EvalProperties, SelectionIgnoresCandidateOrder) {
    std::mt19937_64 rng(23);
    auto base = select_ensemble(test::reference_candidates());
    for (int t = 0; t < 50; ++t) {
        auto cands = test::reference_candidates();
        for (auto& [g, list] : cands) std::shuffle(list.begin(), list.end(), rng);
        auto sel = select_ensemble(cands);
        for (Group g : kAllGroups) EXPECT_EQ(sel.at(g).chosen.spec, base.at(g).chosen.spec);
    }
}

TEST(SelectEnsemble, Errors) {
    auto cands = test::reference_candidates();
    try {
        select_ensemble(cands, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoEligibleModel);
    }
    std::map<Group, std::vector<Candidate>> undefined;
    Candidate c{make_spec(ClassifierKind::Csp), {}};
    c.cv.npv = 1.0;
    undefined[Group::Nfv].push_back(c);
    EXPECT_THROW(select_ensemble(undefined), Error);
}

BranchSample sample(Group g, int id, std::uint8_t bit) {
    BranchSample s;
    s.src = "s" + std::to_string(id);
    s.dst = "d" + std::to_string(id);
    if (g == Group::Inter) {
        s.origin = Origin::CandidateInter;
        s.src_domain = Domain::SdnCp;
        s.dst_domain = Domain::Nfv;
    } else {
        s.src_domain = s.dst_domain = static_cast<Domain>(static_cast<int>(g));
    }
    s.features[0] = bit;
    s.features[1] = static_cast<std::uint8_t>(id % 2);
    return s;
}

// CSP that fires on feature 0 when `fire`, otherwise never.
TrainedModel csp(bool fire) {
    LabeledData d;
    d.width = kBranchFeatureCount;
    std::vector<double> row(kBranchFeatureCount, 0.0);
    row[0] = 1;
    if (fire) {
        d.add(row, P);
        row[1] = 1;
        d.add(row, P);
    } else {
        d.add(row, N);
    }
    return fit(make_spec(ClassifierKind::Csp), d);
}

EnsembleModel ensemble(bool fire) {
    std::map<Group, TrainedModel> m;
    for (Group g : kAllGroups) m.emplace(g, csp(fire));
    return EnsembleModel(std::move(m));
}

TEST(PredictNovel, ConstantNegativeGivesFullReduction) {
    std::vector<BranchSample> c;
    for (int i = 0; i < 10; ++i) c.push_back(sample(kAllGroups[i % 5], i, 1));
    auto r = predict_novel(ensemble(false), c);
    EXPECT_TRUE(r.positives.empty());
    EXPECT_DOUBLE_EQ(*r.reduction, 1.0);
    EXPECT_EQ(r.candidates, 10u);
}

TEST(PredictNovel, ReductionArithmetic) {
    std::vector<BranchSample> c;
    for (int i = 0; i < 10; ++i) c.push_back(sample(Group::Nfv, i, i < 4 ? 1 : 0));
    auto r = predict_novel(ensemble(true), c);
    EXPECT_EQ(r.positives.size(), 4u);
    EXPECT_DOUBLE_EQ(*r.reduction, 0.6);
    EXPECT_EQ(r.positives_by_group.at(Group::Nfv), 4u);
    EXPECT_EQ(r.candidates_by_group.at(Group::SdnCp), 0u);

    std::vector<BranchSample> big;
    for (int i = 0; i < 1625; ++i) big.push_back(sample(Group::SdnDp, i, i < 93 ? 1 : 0));
    EXPECT_NEAR(*predict_novel(ensemble(true), big).reduction, 0.9428, 5e-5);
    EXPECT_FALSE(predict_novel(ensemble(true), {}).reduction);
}

// Property: positives are the union of each group model's own predictions.
TEST(EvalProperties, PositivesAreUnionOfGroups) {
    std::mt19937_64 rng(24);
    std::map<Group, TrainedModel> models;
    std::map<Group, bool> fires;
    for (Group g : kAllGroups) {
        fires[g] = std::bernoulli_distribution(0.5)(rng);
        models.emplace(g, csp(fires[g]));
    }
    EnsembleModel e(models);
    std::vector<BranchSample> c;
    for (int i = 0; i < 200; ++i)
        c.push_back(sample(kAllGroups[rng() % 5], i, static_cast<std::uint8_t>(rng() % 2)));
    auto r = predict_novel(e, c);
    std::size_t expected = 0;
    for (const auto& s : c)
        if (models.at(s.group()).predict(std::vector<double>(s.features.begin(), s.features.end())) == P)
            ++expected;
    EXPECT_EQ(r.positives.size(), expected);
    for (const auto& p : r.positives) EXPECT_TRUE(fires.at(p.group));
    EXPECT_TRUE(std::is_sorted(r.positives.begin(), r.positives.end(), [](const auto& a, const auto& b) {
        return std::tie(a.group, a.src, a.dst) < std::tie(b.group, b.src, b.dst);
    }));
}

TEST(Ensemble, NeedsEveryGroup) {
    std::map<Group, TrainedModel> m;
    m.emplace(Group::SdnCp, csp(true));
    EXPECT_THROW(EnsembleModel{m}, Error);
}

}  // namespace
}  // namespace agml
