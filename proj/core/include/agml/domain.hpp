#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace agml {

// The four attack-graph domains.
enum class Domain { SdnCp, SdnDp, Nfv, MalPeriph };

inline constexpr std::array<Domain, 4> kAllDomains = {Domain::SdnCp, Domain::SdnDp, Domain::Nfv,
                                                      Domain::MalPeriph};

std::string_view to_string(Domain d);
std::optional<Domain> parse_domain(std::string_view tag);

// Dataset groups: one per domain plus the inter-graph group.
enum class Group { SdnCp, SdnDp, Nfv, MalPeriph, Inter };

inline constexpr std::array<Group, 5> kAllGroups = {Group::SdnCp, Group::SdnDp, Group::Nfv,
                                                    Group::MalPeriph, Group::Inter};

std::string_view to_string(Group g);
std::optional<Group> parse_group(std::string_view tag);
Group group_of(Domain d);

}  // namespace agml
