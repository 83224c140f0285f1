#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agml/domain.hpp"
#include "agml/learners.hpp"

namespace agml::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
    std::string corpus;
    std::string labels;
    std::string tags;
    std::uint64_t seed = 42;
    double ratio = 0.85;
    int folds = 3;
    double precision_floor = 0.05;
    int resample_min = kMinResample;
    int resample_max = kMaxResample;
    std::string out = "out";
    std::optional<Group> group;
    std::string model;
    // Candidate classifiers tried for every group, in this order.
    std::vector<ClassifierKind> kinds{std::begin(kAllKinds), std::end(kAllKinds)};
    int knn_k = 3;
    std::map<Group, std::pair<int, int>> mlp_hidden{
        {Group::SdnCp, {6, 2}}, {Group::SdnDp, {8, 2}}, {Group::Nfv, {5, 2}},
        {Group::MalPeriph, {5, 2}}, {Group::Inter, {5, 2}}};

    void check() const;
};

/// Applies `key = value` lines onto cfg. Relative paths are taken against
/// base_dir. Unknown keys and bad values throw agml::Error(InvalidArgument).
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& base_dir = "");

/// Candidate classifier specs for one group, seeded from the run seed.
std::vector<ClassifierSpec> candidate_specs(const RunConfig& cfg, Group g);

/// Entry point shared by the binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agml::cli
