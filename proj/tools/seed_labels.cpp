// Writes the bundled feasibility label table for a corpus.
//
// Existing edges are feasible. Any other ordered pair is labeled feasible when
// source and destination share at least two of the component and effect
// attributes below, i.e. the second operation acts on the same part of the
// system the first one already reached.

#include <CLI11.hpp>
#include <array>
#include <fstream>
#include <iostream>
#include <string_view>

#include "agml/corpus.hpp"
#include "agml/dataset.hpp"
#include "agml/errors.hpp"
#include "agml/features.hpp"
#include "agml/graph.hpp"

namespace {

constexpr std::array<std::string_view, 9> kSharedAttributes = {
    "controller",      "vnf",                   "hypervisor",
    "management_layer", "data_plane",           "control_channel",
    "sensitive_information", "access_control",  "flooding"};

bool feasible(const agml::BranchFeatures& f) {
    int shared = 0;
    for (auto name : kSharedAttributes) {
        std::size_t i = *agml::feature_index(name);
        shared += f[i] && f[agml::kNodeFeatureCount + i];
    }
    return shared >= 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate the seed feasibility label table", "agml-seed-labels"};
    std::string corpus_path, out_path;
    app.add_option("--corpus", corpus_path, "attack-vector corpus")->required();
    app.add_option("--out", out_path, "label CSV to write (default: stdout)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        auto corpus = agml::load_corpus(corpus_path);
        auto graphs = agml::build_domain_graphs(corpus);
        auto samples = agml::generate_candidates(graphs.graphs, corpus.operation_table(),
                                                 agml::CandidateMode::Both);
        agml::LabelTable table;
        std::size_t pos = 0;
        for (const auto& s : samples) {
            agml::PairKey key{s.src, s.dst};
            bool yes = s.origin == agml::Origin::ExistingEdge || feasible(s.features);
            auto [it, inserted] = table.emplace(key, yes ? agml::Label::Positive : agml::Label::Negative);
            // A pair that is an edge in one graph stays feasible everywhere.
            if (!inserted && yes) it->second = agml::Label::Positive;
        }
        for (const auto& [k, l] : table) pos += l == agml::Label::Positive;
        std::string text = agml::format_label_table(table);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
            if (!(out << text)) throw agml::Error(agml::ErrorCode::Io, "cannot write " + out_path);
        }
        std::cerr << "agml-seed-labels: " << table.size() << " pairs, " << pos << " feasible\n";
    } catch (const agml::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
