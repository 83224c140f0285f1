#include "agml/protocol_impact.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "agml/errors.hpp"

namespace agml {

using json = nlohmann::json;

std::string_view to_string(AkaProperty p) {
    static constexpr std::string_view names[] = {"S1", "S2", "A1", "A2", "A3",
                                                 "A4", "A5", "A6", "A7"};
    return names[static_cast<int>(p)];
}

std::string_view description(AkaProperty p) {
    switch (p) {
        case AkaProperty::S1: return "UE long-term key stays secret";
        case AkaProperty::S2: return "AUSF and SEAF keys stay secret";
        case AkaProperty::A1: return "SN and UE agree on the UE identity";
        case AkaProperty::A2: return "UE and SN agree on the SN identity";
        case AkaProperty::A3: return "HN and SN agree on the UE identity";
        case AkaProperty::A4: return "UE and HN agree on the HN identity";
        case AkaProperty::A5: return "UE and HN agree on the SN identity";
        case AkaProperty::A6: return "UE, HN and SN agree on K_SEAF";
        case AkaProperty::A7: return "each K_SEAF instance is used at most once";
    }
    return "?";
}

std::string_view to_string(CompromisedElement e) {
    switch (e) {
        case CompromisedElement::AusfArpfPassiveMitm: return "AUSF-ARPF-passive-MiTM";
        case CompromisedElement::AusfArpfActiveMitm: return "AUSF-ARPF-active-MiTM";
        case CompromisedElement::Seaf: return "SEAF";
        case CompromisedElement::Ausf: return "AUSF";
        case CompromisedElement::Arpf: return "ARPF";
    }
    return "?";
}

std::optional<CompromisedElement> parse_element(std::string_view name) {
    for (auto e : kAllElements)
        if (to_string(e) == name) return e;
    return std::nullopt;
}

std::string_view to_string(AkaAttackClass c) {
    switch (c) {
        case AkaAttackClass::Flooding: return "flooding";
        case AkaAttackClass::VnfTermination: return "vnf-termination";
        case AkaAttackClass::PassiveMitm: return "passive-mitm";
        case AkaAttackClass::VnfHijack: return "vnf-hijack";
        case AkaAttackClass::ActiveMitm: return "active-mitm";
    }
    return "?";
}

std::optional<AkaAttackClass> parse_attack_class(std::string_view name) {
    for (auto c : kAllAttackClasses)
        if (to_string(c) == name) return c;
    return std::nullopt;
}

PropertySet satisfied_properties(CompromisedElement e) {
    using P = AkaProperty;
    switch (e) {
        case CompromisedElement::AusfArpfPassiveMitm: return {P::S1, P::A3, P::A4};
        case CompromisedElement::AusfArpfActiveMitm: return {P::S1, P::A3};
        case CompromisedElement::Seaf: return {P::S1, P::A4};
        case CompromisedElement::Ausf: return {P::S1, P::A4};
        case CompromisedElement::Arpf: return {P::S1, P::A3};
    }
    return {};
}

PropertySet violated_properties(CompromisedElement e) {
    PropertySet ok = satisfied_properties(e), out;
    for (auto p : kAllProperties)
        if (!ok.count(p)) out.insert(p);
    return out;
}

double session_confusion_probability(std::int64_t n) {
    if (n < 1) throw Error(ErrorCode::InvalidCount, "need at least one authentication request");
    return 1.0 - 1.0 / static_cast<double>(n);
}

TagTable parse_tag_table(std::string_view text) {
    TagTable table;
    try {
        json j = json::parse(text);
        if (j.contains("op_tags"))
            for (const auto& [op, tags] : j.at("op_tags").items())
                table.op_tags[op] = tags.get<std::vector<std::string>>();
        for (const auto& r : j.at("rules")) {
            auto cls = parse_attack_class(r.at("class").get<std::string>());
            if (!cls) throw MalformedInput(0, "unknown attack class " + r.at("class").dump());
            table.rules.push_back({*cls, r.at("all_of").get<std::vector<std::string>>()});
        }
        for (const auto& [name, elems] : j.at("class_elements").items()) {
            auto cls = parse_attack_class(name);
            if (!cls) throw MalformedInput(0, "unknown attack class " + name);
            auto& list = table.class_elements[*cls];
            for (const auto& e : elems) {
                auto el = parse_element(e.get<std::string>());
                if (!el) throw MalformedInput(0, "unknown compromised element " + e.dump());
                list.push_back(*el);
            }
        }
    } catch (const json::parse_error& e) {
        throw MalformedInput(e.byte, e.what());
    } catch (const json::exception& e) {
        throw MalformedInput(0, e.what());
    }
    return table;
}

TagTable load_tag_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_tag_table(ss.str());
}

ImpactSummary map_exploits_to_aka(const ExploitReport& report, const TagTable& tags) {
    ImpactSummary summary;
    for (const auto& x : report.positives) {
        // The new branch lands on dst, so dst carries the consequence.
        std::set<std::string> have;
        for (std::size_t i = 0; i < kAttributeCount; ++i)
            if (x.features[kNodeFeatureCount + i]) have.insert(std::string(kFeatureNames[i]));
        if (auto it = tags.op_tags.find(x.dst); it != tags.op_tags.end())
            have.insert(it->second.begin(), it->second.end());

        ExploitImpact impact;
        impact.src = x.src;
        impact.dst = x.dst;
        impact.group = x.group;
        for (const auto& rule : tags.rules) {
            bool all = std::all_of(rule.all_of.begin(), rule.all_of.end(),
                                   [&](const std::string& t) { return have.count(t) > 0; });
            if (all && !rule.all_of.empty()) impact.classes.insert(rule.attack_class);
        }
        if (impact.classes.empty()) {
            summary.protocol_neutral.emplace_back(x.src, x.dst);
            continue;
        }
        for (auto c : impact.classes) {
            ++summary.class_counts[c];
            if (auto it = tags.class_elements.find(c); it != tags.class_elements.end())
                impact.elements.insert(it->second.begin(), it->second.end());
        }
        for (auto e : impact.elements) {
            auto v = violated_properties(e);
            impact.violations.insert(v.begin(), v.end());
        }
        impact.session_confusion = impact.classes.count(AkaAttackClass::Flooding) > 0;
        impact.availability_only = impact.elements.empty();
        summary.violations.insert(impact.violations.begin(), impact.violations.end());
        summary.exploits.push_back(std::move(impact));
    }
    return summary;
}

std::string impact_to_json(const ImpactSummary& summary) {
    auto props = [](const PropertySet& s) {
        json a = json::array();
        for (auto p : s) a.push_back(std::string(to_string(p)));
        return a;
    };
    json j;
    j["exploits"] = json::array();
    for (const auto& x : summary.exploits) {
        json classes = json::array(), elements = json::array();
        for (auto c : x.classes) classes.push_back(std::string(to_string(c)));
        for (auto e : x.elements) elements.push_back(std::string(to_string(e)));
        j["exploits"].push_back({{"src", x.src},
                                 {"dst", x.dst},
                                 {"group", std::string(to_string(x.group))},
                                 {"classes", classes},
                                 {"elements", elements},
                                 {"violations", props(x.violations)},
                                 {"session_confusion", x.session_confusion},
                                 {"availability_only", x.availability_only}});
    }
    j["protocol_neutral"] = json::array();
    for (const auto& [s, d] : summary.protocol_neutral) j["protocol_neutral"].push_back({s, d});
    j["class_counts"] = json::object();
    for (auto c : kAllAttackClasses) {
        auto it = summary.class_counts.find(c);
        j["class_counts"][std::string(to_string(c))] = it == summary.class_counts.end() ? 0 : it->second;
    }
    j["violations"] = props(summary.violations);
    return j.dump(2);
}

}  // namespace agml
