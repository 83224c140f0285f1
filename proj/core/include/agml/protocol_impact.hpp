#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "agml/corpus.hpp"
#include "agml/eval.hpp"

namespace agml {

enum class AkaProperty { S1, S2, A1, A2, A3, A4, A5, A6, A7 };

inline constexpr std::array<AkaProperty, 9> kAllProperties = {
    AkaProperty::S1, AkaProperty::S2, AkaProperty::A1, AkaProperty::A2, AkaProperty::A3,
    AkaProperty::A4, AkaProperty::A5, AkaProperty::A6, AkaProperty::A7};

std::string_view to_string(AkaProperty p);
std::string_view description(AkaProperty p);

enum class CompromisedElement { AusfArpfPassiveMitm, AusfArpfActiveMitm, Seaf, Ausf, Arpf };

inline constexpr std::array<CompromisedElement, 5> kAllElements = {
    CompromisedElement::AusfArpfPassiveMitm, CompromisedElement::AusfArpfActiveMitm,
    CompromisedElement::Seaf, CompromisedElement::Ausf, CompromisedElement::Arpf};

std::string_view to_string(CompromisedElement e);
std::optional<CompromisedElement> parse_element(std::string_view name);

enum class AkaAttackClass { Flooding, VnfTermination, PassiveMitm, VnfHijack, ActiveMitm };

inline constexpr std::array<AkaAttackClass, 5> kAllAttackClasses = {
    AkaAttackClass::Flooding, AkaAttackClass::VnfTermination, AkaAttackClass::PassiveMitm,
    AkaAttackClass::VnfHijack, AkaAttackClass::ActiveMitm};

std::string_view to_string(AkaAttackClass c);
std::optional<AkaAttackClass> parse_attack_class(std::string_view name);

using PropertySet = std::set<AkaProperty>;

PropertySet violated_properties(CompromisedElement e);
PropertySet satisfied_properties(CompromisedElement e);

// 1 - 1/n for n simultaneous authentication requests. InvalidCount if n < 1.
double session_confusion_probability(std::int64_t n);

struct TagRule {
    AkaAttackClass attack_class = AkaAttackClass::Flooding;
    std::vector<std::string> all_of;
};

/// Editable mapping from exploit tags to attack classes and from classes to
/// compromised elements.
struct TagTable {
    std::map<std::string, std::vector<std::string>> op_tags;
    std::vector<TagRule> rules;
    std::map<AkaAttackClass, std::vector<CompromisedElement>> class_elements;
};

TagTable parse_tag_table(std::string_view json);
TagTable load_tag_table(const std::string& path);

struct ExploitImpact {
    std::string src;
    std::string dst;
    Group group = Group::SdnCp;
    std::set<AkaAttackClass> classes;
    std::set<CompromisedElement> elements;
    PropertySet violations;
    bool session_confusion = false;  // flooding enables the race
    bool availability_only = false;  // classes with no property row
};

struct ImpactSummary {
    std::vector<ExploitImpact> exploits;  // exploits with at least one class
    std::vector<std::pair<std::string, std::string>> protocol_neutral;
    std::map<AkaAttackClass, std::size_t> class_counts;
    PropertySet violations;
};

// Tags of an exploit: attribute names set on dst plus op_tags[dst].
ImpactSummary map_exploits_to_aka(const ExploitReport& report, const TagTable& tags);

std::string impact_to_json(const ImpactSummary& summary);

}  // namespace agml
