#include <benchmark/benchmark.h>

#include <string>

#include "agml/corpus.hpp"
#include "agml/dataset.hpp"
#include "agml/graph.hpp"
#include "agml/learners.hpp"

namespace {

using namespace agml;

struct Bundle {
    CorpusFile corpus = load_corpus(std::string(AGML_DATA_DIR) + "/seed.corpus");
    OperationTable ops = corpus.operation_table();
    DomainGraphs graphs = build_domain_graphs(corpus);
    LabelTable labels = load_label_table(std::string(AGML_DATA_DIR) + "/seed_labels.csv");
};

const Bundle& bundle() {
    static const Bundle b;
    return b;
}

// Training rows of one group with labels applied.
LabeledData group_data(Group g) {
    auto samples = generate_candidates(bundle().graphs.graphs, bundle().ops, CandidateMode::Both);
    apply_labels(samples, bundle().labels);
    std::vector<BranchSample> picked;
    for (auto& s : samples)
        if (s.group() == g && s.label != Label::Unlabeled) picked.push_back(std::move(s));
    return to_labeled_data(picked);
}

void BM_BuildGraphs(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_domain_graphs(bundle().corpus));
}
BENCHMARK(BM_BuildGraphs);

void BM_EnumeratePaths(benchmark::State& state) {
    const auto& g = bundle().graphs.graphs[static_cast<std::size_t>(state.range(0))];
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_paths(g));
}
BENCHMARK(BM_EnumeratePaths)->DenseRange(0, 3);

void BM_GenerateCandidates(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_candidates(bundle().graphs.graphs, bundle().ops, CandidateMode::Both));
}
BENCHMARK(BM_GenerateCandidates)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
    static const LabeledData data = group_data(Group::SdnDp);
    auto kind = kAllKinds[static_cast<std::size_t>(state.range(0))];
    auto spec = make_spec(kind, 1);
    if (kind != ClassifierKind::Csp) spec.resample_n = 3;
    for (auto _ : state) benchmark::DoNotOptimize(fit(spec, data));
    state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Fit)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void BM_PredictInter(benchmark::State& state) {
    static const LabeledData data = group_data(Group::Inter);
    auto kind = kAllKinds[static_cast<std::size_t>(state.range(0))];
    auto spec = make_spec(kind, 1);
    if (kind == ClassifierKind::Mlp) spec.hp.mlp_epochs = 50;
    auto model = fit(spec, data);
    for (auto _ : state) benchmark::DoNotOptimize(model.predict(data.rows));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.size()));
    state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_PredictInter)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
