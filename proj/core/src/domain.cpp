#include "agml/domain.hpp"

#include "agml/features.hpp"

namespace agml {

std::string_view to_string(Domain d) {
    switch (d) {
        case Domain::SdnCp: return "SDN-CP";
        case Domain::SdnDp: return "SDN-DP";
        case Domain::Nfv: return "NFV";
        case Domain::MalPeriph: return "MAL-PERIPH";
    }
    return "?";
}

std::optional<Domain> parse_domain(std::string_view tag) {
    for (Domain d : kAllDomains)
        if (to_string(d) == tag) return d;
    return std::nullopt;
}

std::string_view to_string(Group g) {
    switch (g) {
        case Group::SdnCp: return "SDN-CP";
        case Group::SdnDp: return "SDN-DP";
        case Group::Nfv: return "NFV";
        case Group::MalPeriph: return "MAL-PERIPH";
        case Group::Inter: return "inter-graph";
    }
    return "?";
}

std::optional<Group> parse_group(std::string_view tag) {
    for (Group g : kAllGroups)
        if (to_string(g) == tag) return g;
    if (tag == "inter" || tag == "INTER") return Group::Inter;
    return std::nullopt;
}

Group group_of(Domain d) {
    switch (d) {
        case Domain::SdnCp: return Group::SdnCp;
        case Domain::SdnDp: return Group::SdnDp;
        case Domain::Nfv: return Group::Nfv;
        case Domain::MalPeriph: return Group::MalPeriph;
    }
    return Group::Inter;
}

std::optional<std::size_t> feature_index(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
        if (kFeatureNames[i] == name) return i;
    return std::nullopt;
}

std::size_t domain_feature(Domain d) {
    return kAttributeCount + static_cast<std::size_t>(d);
}

}  // namespace agml
