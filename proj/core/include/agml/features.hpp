#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "agml/domain.hpp"

namespace agml {

inline constexpr std::size_t kNodeFeatureCount = 19;
inline constexpr std::size_t kBranchFeatureCount = 2 * kNodeFeatureCount;

/// Canonical node feature order. The first 13 are static attributes, then
/// four domain bits, then the positional head/tail bits.
inline constexpr std::array<std::string_view, kNodeFeatureCount> kFeatureNames = {
    "application_layer", "controller",           "app_controller_interface",
    "vnf",               "network_infrastructure", "management_layer",
    "hypervisor",        "flooding",             "access_control",
    "data_plane",        "sca",                  "control_channel",
    "sensitive_information", "sdn_cp",           "sdn_dp",
    "nfv",               "malicious_peripheral", "head",
    "tail",
};

inline constexpr std::array<std::string_view, kNodeFeatureCount> kFeatureLabels = {
    "Application layer", "Controller",  "Application-controller interface",
    "VNF",               "Network infrastructure", "Management layer",
    "Hypervisor",        "Flooding",    "Access control",
    "Data plane",        "SCA",         "Control channel",
    "Sensitive information", "SDN-CP",  "SDN-DP",
    "NFV",               "Malicious peripheral", "Head",
    "Tail",
};

inline constexpr std::size_t kAttributeCount = 13;
inline constexpr std::size_t kHeadFeature = 17;
inline constexpr std::size_t kTailFeature = 18;

std::optional<std::size_t> feature_index(std::string_view name);
std::size_t domain_feature(Domain d);

using NodeFeatures = std::array<std::uint8_t, kNodeFeatureCount>;
using BranchFeatures = std::array<std::uint8_t, kBranchFeatureCount>;

}  // namespace agml
