#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "agml/errors.hpp"
#include "agml/learners.hpp"

namespace agml {
namespace {

using Row = std::vector<double>;
constexpr Label P = Label::Positive;
constexpr Label N = Label::Negative;

LabeledData make(std::size_t width, std::vector<std::pair<std::vector<double>, Label>> rows) {
    LabeledData d;
    d.width = width;
    for (auto& [r, l] : rows) d.add(r, l);
    return d;
}

LabeledData random_binary(std::mt19937_64& rng, std::size_t n, std::size_t width, double p_pos) {
    LabeledData d;
    d.width = width;
    std::bernoulli_distribution bit(0.3), pos(p_pos);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> r(width);
        for (auto& v : r) v = bit(rng);
        d.add(r, pos(rng) ? P : N);
    }
    return d;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Io;
}

TEST(Spec, DisplayNamesAndKinds) {
    EXPECT_EQ(make_spec(ClassifierKind::GaussianNb).display_name(), "NB");
    EXPECT_EQ(make_spec(ClassifierKind::Knn).display_name(), "kNN (k=3)");
    EXPECT_EQ(make_mlp_spec(6, 2).display_name(), "MLP (6,2)");
    for (auto k : kAllKinds) EXPECT_EQ(parse_kind(to_string(k)), k);
    EXPECT_EQ(to_string(ClassifierKind::SvmRbf), "svm-rbf");
    EXPECT_FALSE(parse_kind("random-forest"));
}

TEST(Spec, CheckRejectsBadHyperparameters) {
    auto s = make_spec(ClassifierKind::Knn);
    s.hp.knn_k = 0;
    EXPECT_THROW(s.check(), Error);
    auto m = make_mlp_spec(0, 2);
    EXPECT_THROW(m.check(), Error);
    auto r = make_spec(ClassifierKind::SvmRbf);
    r.resample_n = 2;
    EXPECT_EQ(code_of([&] { r.check(); }), ErrorCode::OutOfRange);
}

TEST(Csp, SetConstruction) {
    auto d = make(2, {{{1, 0}, P}, {{0, 1}, P}, {{0, 0}, N}});
    auto m = fit(make_spec(ClassifierKind::Csp), d);
    EXPECT_EQ(std::get<CspParams>(m.params()).positives,
              (std::set<std::vector<double>>{{1, 0}, {0, 1}}));
}

TEST(Csp, Membership) {
    auto m = fit(make_spec(ClassifierKind::Csp), make(2, {{{1, 0}, P}}));
    EXPECT_EQ(m.predict(Row{1, 0}), P);
    EXPECT_EQ(m.predict(Row{0, 0}), N);
}

TEST(Csp, ResamplingLeavesSetUnchanged) {
    std::mt19937_64 rng(1);
    auto d = random_binary(rng, 60, 12, 0.3);
    auto raw = fit(make_spec(ClassifierKind::Csp), d);
    auto spec = make_spec(ClassifierKind::Csp);
    spec.resample_n = 7;
    EXPECT_EQ(fit(spec, d).params(), raw.params());
}

// Property: every training positive is predicted +1.
TEST(LearnerProperties, CspRecallOnTrainingPositivesIsOne) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 300; ++t) {
        std::size_t width = std::uniform_int_distribution<std::size_t>(1, 38)(rng);
        auto d = random_binary(rng, std::uniform_int_distribution<std::size_t>(1, 80)(rng), width, 0.4);
        auto m = fit(make_spec(ClassifierKind::Csp), d);
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d.labels[i] == P) EXPECT_EQ(m.predict(d.rows[i]), P);
    }
}

TEST(NaiveBayes, HandComputedPosterior) {
    // Positives at 0, negatives at 1: 0.1 sits much closer to the positive mean.
    auto d = make(1, {{{0}, P}, {{0}, P}, {{1}, N}, {{1}, N}});
    auto m = fit(make_spec(ClassifierKind::GaussianNb), d);
    EXPECT_EQ(m.predict(Row{0.1}), P);
    EXPECT_EQ(m.predict(Row{0.9}), N);
    const auto& p = std::get<NbParams>(m.params());
    EXPECT_DOUBLE_EQ(p.prior[0], 0.5);
    EXPECT_DOUBLE_EQ(p.mean[1][0], 0.0);
    EXPECT_DOUBLE_EQ(p.mean[0][0], 1.0);
    // max variance over the pooled column is 0.25
    EXPECT_DOUBLE_EQ(p.epsilon, 0.25e-9);
}

TEST(NaiveBayes, TieGoesNegative) {
    auto d = make(1, {{{0}, P}, {{1}, P}, {{0}, N}, {{1}, N}});
    auto m = fit(make_spec(ClassifierKind::GaussianNb), d);
    EXPECT_EQ(m.predict(Row{0.5}), N);
}

TEST(DecisionTree, SplitsOnTheSeparatingFeature) {
    LabeledData d;
    d.width = 6;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 40; ++i) {
        std::vector<double> r(6);
        for (auto& v : r) v = std::bernoulli_distribution(0.5)(rng);
        d.add(r, r[3] == 1 ? P : N);
    }
    auto m = fit(make_spec(ClassifierKind::DecisionTree), d);
    const auto& t = std::get<TreeParams>(m.params());
    EXPECT_EQ(t.depth(), 1);
    EXPECT_EQ(t.nodes[0].feature, 3);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(m.predict(d.rows[i]), d.labels[i]);
}

// Property: unlimited depth fits any consistent training set exactly.
TEST(LearnerProperties, TreeFitsConsistentData) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        auto raw = random_binary(rng, 80, 10, 0.3);
        std::map<std::vector<double>, Label> first;
        LabeledData d;
        d.width = raw.width;
        for (std::size_t i = 0; i < raw.size(); ++i)
            if (first.emplace(raw.rows[i], raw.labels[i]).second) d.add(raw.rows[i], raw.labels[i]);
        if (d.count(P) == 0 || d.count(N) == 0) continue;
        auto m = fit(make_spec(ClassifierKind::DecisionTree), d);
        for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(m.predict(d.rows[i]), d.labels[i]);
    }
}

TEST(DecisionTree, DepthLimit) {
    std::mt19937_64 rng(5);
    auto d = random_binary(rng, 100, 8, 0.5);
    auto spec = make_spec(ClassifierKind::DecisionTree);
    spec.hp.tree_max_depth = 2;
    EXPECT_LE(std::get<TreeParams>(fit(spec, d).params()).depth(), 2);
}

TEST(Knn, HandRankedVote) {
    auto d = make(2, {{{0, 0}, N}, {{0, 1}, N}, {{1, 1}, P}, {{1, 0}, P}});
    auto m = fit(make_spec(ClassifierKind::Knn), d);
    EXPECT_EQ(m.predict(Row{0.9, 0.9}), P);
}

TEST(Knn, DistanceTiesGoToLowerTrainingIndex) {
    // Query is equidistant from all four points; k=3 takes indices 0,1,2.
    auto d = make(2, {{{0, 0}, P}, {{1, 1}, P}, {{0, 1}, N}, {{1, 0}, N}});
    auto spec = make_spec(ClassifierKind::Knn);
    EXPECT_EQ(fit(spec, d).predict(Row{0.5, 0.5}), P);
    auto swapped = make(2, {{{0, 0}, N}, {{1, 1}, N}, {{0, 1}, P}, {{1, 0}, P}});
    EXPECT_EQ(fit(spec, swapped).predict(Row{0.5, 0.5}), N);
}

// Property: k=1 returns each training point's own label when points are unique.
TEST(LearnerProperties, KnnSelfMatch) {
    std::mt19937_64 rng(6);
    auto raw = random_binary(rng, 200, 16, 0.3);
    std::set<std::vector<double>> seen;
    LabeledData d;
    d.width = raw.width;
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (seen.insert(raw.rows[i]).second) d.add(raw.rows[i], raw.labels[i]);
    auto spec = make_spec(ClassifierKind::Knn);
    spec.hp.knn_k = 1;
    auto m = fit(spec, d);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(m.predict(d.rows[i]), d.labels[i]);
}

// Brute-force oracle: stable sort by squared distance, majority of k, tie -1.
Label knn_oracle(const LabeledData& d, const std::vector<double>& x, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double dist = 0;
        for (std::size_t j = 0; j < x.size(); ++j) dist += (x[j] - d.rows[i][j]) * (x[j] - d.rows[i][j]);
        order.emplace_back(dist, i);
    }
    std::sort(order.begin(), order.end());
    int vote = 0;
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i) vote += static_cast<int>(d.labels[order[i].second]);
    return vote > 0 ? P : N;
}

TEST(Knn, MatchesBruteForceOracle) {
    std::mt19937_64 rng(7);
    for (int k : {1, 3, 5}) {
        auto d = random_binary(rng, 300, 38, 0.2);
        auto spec = make_spec(ClassifierKind::Knn);
        spec.hp.knn_k = k;
        auto m = fit(spec, d);
        for (int q = 0; q < 200; ++q) {
            std::vector<double> x(38);
            for (auto& v : x) v = std::bernoulli_distribution(0.3)(rng);
            EXPECT_EQ(m.predict(x), knn_oracle(d, x, k));
            x[0] += 0.25;  // non-binary query takes the generic path
            EXPECT_EQ(m.predict(x), knn_oracle(d, x, k));
        }
    }
}

TEST(Svm, SeparatesEasyData) {
    LabeledData d;
    d.width = 4;
    for (int i = 0; i < 10; ++i) {
        d.add({1, 1, 0, static_cast<double>(i % 2)}, P);
        d.add({0, 0, 1, static_cast<double>(i % 2)}, N);
    }
    auto m = fit(make_spec(ClassifierKind::SvmRbf), d);
    const auto& p = std::get<SvmParams>(m.params());
    EXPECT_TRUE(p.converged);
    EXPECT_FALSE(p.support.empty());
    EXPECT_EQ(m.predict(Row{1, 1, 0, 0}), P);
    EXPECT_EQ(m.predict(Row{0, 0, 1, 1}), N);
    EXPECT_GT(m.score(Row{1, 1, 0, 0}), 0);
}

TEST(Svm, DualCoefficientsRespectTheBox) {
    std::mt19937_64 rng(8);
    auto d = random_binary(rng, 120, 10, 0.3);
    auto m = fit(make_spec(ClassifierKind::SvmRbf), d);
    const auto& p = std::get<SvmParams>(m.params());
    double balance = 0;
    for (double c : p.coef) balance += c;
    // sum alpha_i y_i = 0 at the optimum
    EXPECT_NEAR(balance, 0.0, 1e-9);
}

// Generic and popcount kernels must give the same decision values.
TEST(Svm, BinaryFastPathAgreesWithGeneric) {
    std::mt19937_64 rng(9);
    auto d = random_binary(rng, 150, 38, 0.3);
    auto m = fit(make_spec(ClassifierKind::SvmRbf), d);
    const auto& p = std::get<SvmParams>(m.params());
    for (int q = 0; q < 100; ++q) {
        std::vector<double> x(38);
        for (auto& v : x) v = std::bernoulli_distribution(0.3)(rng);
        double generic = p.bias;
        for (std::size_t i = 0; i < p.support.size(); ++i) {
            double dist = 0;
            for (std::size_t j = 0; j < x.size(); ++j) dist += (x[j] - p.support[i][j]) * (x[j] - p.support[i][j]);
            generic += p.coef[i] * std::exp(-p.gamma * dist);
        }
        EXPECT_NEAR(m.score(x), generic, 1e-9);
    }
}

TEST(Mlp, LearnsXorForSomeSeed) {
    auto d = make(2, {{{0, 0}, N}, {{1, 1}, N}, {{0, 1}, P}, {{1, 0}, P}});
    bool solved = false;
    for (std::uint64_t seed = 0; seed < 10 && !solved; ++seed) {
        auto spec = make_mlp_spec(4, 2, seed);
        spec.hp.mlp_learning_rate = 0.5;
        spec.hp.mlp_epochs = 5000;
        auto m = fit(spec, d);
        solved = true;
        for (std::size_t i = 0; i < d.size(); ++i) solved = solved && m.predict(d.rows[i]) == d.labels[i];
    }
    EXPECT_TRUE(solved);
}

TEST(Mlp, DefaultScheduleLowersTheLoss) {
    std::mt19937_64 rng(10);
    auto d = random_binary(rng, 100, 8, 0.4);
    auto spec = make_mlp_spec(5, 2, 3);
    auto before = spec;
    before.hp.mlp_epochs = 0;
    EXPECT_LT(std::get<MlpParams>(fit(spec, d).params()).final_loss,
              std::get<MlpParams>(fit(before, d).params()).final_loss);
}

TEST(GradientCheck, FreshNetwork) {
    std::mt19937_64 rng(11);
    auto d = random_binary(rng, 10, 38, 0.5);
    auto spec = make_mlp_spec(5, 2, 1);
    spec.hp.mlp_epochs = 0;
    auto m = fit(spec, d);
    EXPECT_LT(gradient_check(m, d.rows[0], P, 1e-5), 1e-4);
}

TEST(GradientCheck, ZeroNetworkOutputBias) {
    MlpParams p;
    p.in = 3;
    p.h1 = 2;
    p.h2 = 2;
    p.w1.assign(6, 0);
    p.b1.assign(2, 0);
    p.w2.assign(4, 0);
    p.b2.assign(2, 0);
    p.w3.assign(2, 0);
    auto g = detail::mlp_gradient(p, {0, 0, 0}, 1.0);
    // sigmoid(0) - 1
    EXPECT_DOUBLE_EQ(g.grad.back(), -0.5);
    EXPECT_LT(gradient_check(p, {0, 0, 0}, P), 1e-4);
}

TEST(GradientCheck, DetectsNegatedBackpropTerm) {
    std::mt19937_64 rng(12);
    auto d = random_binary(rng, 10, 38, 0.5);
    // The fault only shows where some first-layer gradient is nonzero.
    bool exercised = false;
    for (std::uint64_t seed = 0; seed < 20 && !exercised; ++seed) {
        auto spec = make_mlp_spec(5, 2, seed);
        spec.hp.mlp_epochs = 0;
        auto m = fit(spec, d);
        const auto& p = std::get<MlpParams>(m.params());
        for (std::size_t i = 0; i < d.size(); ++i) {
            auto g = detail::mlp_gradient(p, d.rows[i], d.labels[i] == P ? 1.0 : 0.0);
            bool live = false;
            for (std::size_t k = 0; k < p.h1 * p.in + p.h1; ++k) live = live || std::abs(g.grad[k]) > 1e-3;
            if (!live) continue;
            exercised = true;
            EXPECT_LT(gradient_check(p, d.rows[i], d.labels[i]), 1e-4);
            EXPECT_GT(detail::gradient_check(p, d.rows[i], d.labels[i], 1e-5, true), 1e-2);
        }
    }
    EXPECT_TRUE(exercised);
}

TEST(GradientCheck, EpsilonRange) {
    MlpParams p;
    p.in = 1;
    p.h1 = 1;
    p.h2 = 1;
    p.w1 = {0.1};
    p.b1 = {0.1};
    p.w2 = {0.1};
    p.b2 = {0.1};
    p.w3 = {0.1};
    EXPECT_EQ(code_of([&] { gradient_check(p, {1}, P, 0.0); }), ErrorCode::OutOfRange);
    EXPECT_EQ(code_of([&] { gradient_check(p, {1}, P, 0.1); }), ErrorCode::OutOfRange);
}

TEST(Fit, Errors) {
    auto single = make(2, {{{1, 0}, N}, {{0, 1}, N}});
    for (auto k : kAllKinds) {
        if (k == ClassifierKind::Csp) continue;
        EXPECT_EQ(code_of([&] { fit(make_spec(k), single); }), ErrorCode::SingleClassTraining);
    }
    EXPECT_NO_THROW(fit(make_spec(ClassifierKind::Csp), single));
    auto nonbinary = make(1, {{{0.5}, P}, {{0}, N}});
    EXPECT_EQ(code_of([&] { fit(make_spec(ClassifierKind::Knn), nonbinary); }), ErrorCode::NonBinaryFeature);
    EXPECT_EQ(code_of([&] { fit(make_spec(ClassifierKind::Knn), LabeledData{}); }), ErrorCode::TooFewSamples);
    auto m = fit(make_spec(ClassifierKind::Csp), make(2, {{{1, 0}, P}}));
    EXPECT_EQ(code_of([&] { m.predict(std::vector<double>{1, 0, 0}); }), ErrorCode::WidthMismatch);
}

// Property: fitting twice with the same spec gives identical predictions.
TEST(LearnerProperties, DeterministicFit) {
    std::mt19937_64 rng(13);
    auto d = random_binary(rng, 120, 20, 0.3);
    auto queries = random_binary(rng, 50, 20, 0.5);
    for (auto k : kAllKinds) {
        auto spec = make_spec(k, 77);
        spec.resample_n = k == ClassifierKind::Csp ? std::nullopt : std::optional<int>(4);
        if (k == ClassifierKind::Mlp) spec.hp.mlp_epochs = 200;
        auto a = fit(spec, d), b = fit(spec, d);
        EXPECT_EQ(a.predict(queries.rows), b.predict(queries.rows)) << to_string(k);
        EXPECT_EQ(a.params(), b.params()) << to_string(k);
    }
}

TEST(ModelIo, RoundTripEveryKind) {
    std::mt19937_64 rng(14);
    auto d = random_binary(rng, 120, 38, 0.3);
    auto queries = random_binary(rng, 100, 38, 0.5);
    for (auto k : kAllKinds) {
        auto spec = make_spec(k, 5);
        if (k == ClassifierKind::Mlp) spec.hp.mlp_epochs = 100;
        if (k != ClassifierKind::Csp) spec.resample_n = 3;
        auto m = fit(spec, d);
        auto back = load_model(save_model(m));
        EXPECT_EQ(back.spec(), m.spec());
        EXPECT_EQ(back.params(), m.params()) << to_string(k);
        EXPECT_EQ(back.predict(queries.rows), m.predict(queries.rows));
        for (const auto& q : queries.rows)
            if (k == ClassifierKind::Mlp) EXPECT_EQ(back.score(q), m.score(q));
    }
}

TEST(ModelIo, Errors) {
    auto m = fit(make_spec(ClassifierKind::Csp), make(2, {{{1, 0}, P}}));
    std::string bytes = save_model(m);
    EXPECT_EQ(code_of([&] { load_model(bytes.substr(0, bytes.size() / 2)); }), ErrorCode::CorruptModel);
    std::string v2 = bytes;
    auto pos = v2.find("\"format_version\": 1");
    ASSERT_NE(pos, std::string::npos);
    v2.replace(pos, 19, "\"format_version\": 2");
    EXPECT_EQ(code_of([&] { load_model(v2); }), ErrorCode::VersionMismatch);
    EXPECT_EQ(code_of([&] { load_model("{}"); }), ErrorCode::CorruptModel);
}

}  // namespace
}  // namespace agml
