#pragma once

#include <sstream>

#include "dmr/model.hpp"

namespace dmr {

/// One disjunct of a rule: a prototype plus enough provenance to point back
/// at the training item it grew from (or at the balancer).
struct RuleAntecedent {
    std::int64_t cloud_id = 0;
    std::optional<std::int64_t> source_sample_id;
    bool synthetic = false;
};

/// Human-readable classifier fragment: one rule per mega-cloud, its member
/// prototypes OR-ed together.
struct Rule {
    std::int64_t mega_cloud_id = 0;
    std::string class_label;
    std::vector<RuleAntecedent> antecedents;
};

/// One rule per mega-cloud, in mega-cloud id order; antecedents follow the
/// mega-cloud's sorted member list.
inline std::vector<Rule> export_rules(const DmrModel& model) {
    if (model.megaclouds.empty()) throw ModelError("export_rules: merge first");
    std::vector<Rule> rules;
    rules.reserve(model.megaclouds.size());
    for (const auto& mc : model.megaclouds) {
        Rule rule;
        rule.mega_cloud_id = mc.id;
        rule.class_label = mc.class_label;
        for (std::int64_t cloud_id : mc.member_cloud_ids) {
            const DataCloud* cloud = model.find_cloud(cloud_id);
            if (cloud == nullptr) {
                throw ModelError("export_rules: mega-cloud " + std::to_string(mc.id) +
                                 " references unknown cloud id " + std::to_string(cloud_id));
            }
            rule.antecedents.push_back({cloud->id, cloud->source_sample_id, cloud->synthetic});
        }
        if (rule.antecedents.empty()) {
            throw ModelError("export_rules: mega-cloud " + std::to_string(mc.id) + " has no members");
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

inline std::string rule_to_string(const Rule& rule) {
    std::ostringstream out;
    out << "IF ";
    for (std::size_t i = 0; i < rule.antecedents.size(); ++i) {
        const RuleAntecedent& a = rule.antecedents[i];
        if (i > 0) out << " OR ";
        out << "(x ~ prototype " << a.cloud_id;
        if (a.source_sample_id.has_value()) {
            out << " [sample " << *a.source_sample_id << "]";
        } else if (a.synthetic) {
            out << " [synthetic]";
        }
        out << ")";
    }
    out << " THEN \"" << rule.class_label << "\"";
    return out.str();
}

}  // namespace dmr
