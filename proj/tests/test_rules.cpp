#include <catch2/catch_amalgamated.hpp>

#include "dmr/pipeline.hpp"
#include "dmr/rules.hpp"
#include "test_support.hpp"

using namespace dmr;

TEST_CASE("rule rendering") {
    SECTION("sample and synthetic provenance markers") {
        Rule rule;
        rule.mega_cloud_id = 0;
        rule.class_label = "cat";
        rule.antecedents.push_back({3, 17, false});
        rule.antecedents.push_back({9, std::nullopt, true});
        REQUIRE(rule_to_string(rule) ==
                "IF (x ~ prototype 3 [sample 17]) OR (x ~ prototype 9 [synthetic]) THEN \"cat\"");
    }

    SECTION("no marker without provenance") {
        Rule rule;
        rule.class_label = "dog";
        rule.antecedents.push_back({5, std::nullopt, false});
        REQUIRE(rule_to_string(rule) == "IF (x ~ prototype 5) THEN \"dog\"");
    }
}

TEST_CASE("export_rules emits one rule per mega-cloud") {
    DmrModel model;
    model.dimensionality = 1;
    ClassModel cm;
    cm.class_label = "a";
    cm.stats.count = 3;
    cm.stats.mean = {0.0};
    cm.stats.variance = 1.0;
    cm.clouds.push_back(make_cloud(0, "a", {0.0}, 1.0, 11, false));
    cm.clouds.push_back(make_cloud(1, "a", {1.0}, 1.0, std::nullopt, true));
    cm.clouds.push_back(make_cloud(2, "a", {9.0}, 1.0, 12, false));
    model.classes.push_back(std::move(cm));
    model.megaclouds.push_back({0, "a", {0, 1}});
    model.megaclouds.push_back({1, "a", {2}});

    const auto rules = export_rules(model);
    REQUIRE(rules.size() == 2);
    REQUIRE(rules[0].mega_cloud_id == 0);
    REQUIRE(rules[0].class_label == "a");
    REQUIRE(rules[0].antecedents.size() == 2);
    REQUIRE(rules[0].antecedents[0].cloud_id == 0);
    REQUIRE(rules[0].antecedents[0].source_sample_id == 11);
    REQUIRE_FALSE(rules[0].antecedents[0].synthetic);
    REQUIRE(rules[0].antecedents[1].cloud_id == 1);
    REQUIRE(rules[0].antecedents[1].synthetic);
    REQUIRE(rules[1].antecedents.size() == 1);
    REQUIRE(rule_to_string(rules[1]) == "IF (x ~ prototype 2 [sample 12]) THEN \"a\"");
}

TEST_CASE("export_rules precondition failures") {
    DmrModel model;
    model.dimensionality = 1;
    ClassModel cm;
    cm.class_label = "a";
    cm.stats.count = 1;
    cm.stats.mean = {0.0};
    cm.stats.variance = 1.0;
    cm.clouds.push_back(make_cloud(0, "a", {0.0}, 1.0, std::nullopt, false));
    model.classes.push_back(std::move(cm));

    SECTION("no mega-clouds yet") {
        REQUIRE_THROWS_WITH(export_rules(model), Catch::Matchers::ContainsSubstring("merge first"));
    }

    SECTION("dangling member reference") {
        model.megaclouds.push_back({0, "a", {0, 42}});
        REQUIRE_THROWS_WITH(export_rules(model),
                            Catch::Matchers::ContainsSubstring("unknown cloud id 42"));
    }

    SECTION("memberless mega-cloud") {
        model.megaclouds.push_back({0, "a", {}});
        REQUIRE_THROWS_WITH(export_rules(model), Catch::Matchers::ContainsSubstring("has no members"));
    }
}

TEST_CASE("rules from a balanced training run carry valid provenance") {
    const dmr::Dataset ds = testsupport::make_blobs({{0.0, 0.0}, {6.0, 6.0}}, {80, 8},
                                                    {"big", "small"}, 0.7, 31);
    TrainOptions opt;
    opt.balance = true;
    opt.seed = 5;
    const TrainResult tr = train_model(ds, opt);
    REQUIRE_FALSE(tr.model.megaclouds.empty());

    const auto rules = export_rules(tr.model);
    REQUIRE(rules.size() == tr.model.megaclouds.size());

    std::size_t synthetic_antecedents = 0;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        REQUIRE(rules[r].mega_cloud_id == tr.model.megaclouds[r].id);
        REQUIRE(rules[r].class_label == tr.model.megaclouds[r].class_label);
        for (const auto& antecedent : rules[r].antecedents) {
            const DataCloud* cloud = tr.model.find_cloud(antecedent.cloud_id);
            REQUIRE(cloud != nullptr);
            REQUIRE(cloud->class_label == rules[r].class_label);
            if (antecedent.synthetic) {
                ++synthetic_antecedents;
            } else {
                // Real prototypes trace back to a training row.
                REQUIRE(antecedent.source_sample_id.has_value());
                REQUIRE(*antecedent.source_sample_id >= 0);
                REQUIRE(*antecedent.source_sample_id < static_cast<std::int64_t>(ds.size()));
            }
        }
    }

    std::size_t synthetic_clouds = 0;
    for (const DataCloud* cloud : tr.model.all_clouds()) {
        if (cloud->synthetic) ++synthetic_clouds;
    }
    REQUIRE(synthetic_antecedents == synthetic_clouds);
}
