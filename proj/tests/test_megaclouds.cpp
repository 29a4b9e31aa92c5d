#include <random>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "dmr/learner.hpp"
#include "dmr/megaclouds.hpp"
#include "dmr/rng.hpp"

using namespace dmr;

namespace {

DmrModel model_from_clouds(const std::vector<std::pair<std::string, double>>& spec) {
    // One 1-D cloud per entry, ids in listing order, grouped into classes.
    std::map<std::string, ClassModel> classes;
    std::int64_t id = 0;
    for (const auto& [label, x] : spec) {
        auto& cm = classes[label];
        cm.class_label = label;
        cm.stats.count += 1;
        cm.stats.mean = {0.0};
        cm.stats.variance = 1.0;
        cm.clouds.push_back(make_cloud(id++, label, {x}, 1.0, std::nullopt, false));
    }
    DmrModel model;
    model.dimensionality = 1;
    for (auto& [label, cm] : classes) model.classes.push_back(std::move(cm));
    return model;
}

}  // namespace

TEST_CASE("adjacent clouds are the two nearest to their midpoint") {
    const DmrModel model = model_from_clouds({{"a", 0.0}, {"a", 1.0}, {"a", 2.0}});
    const auto clouds = model.all_clouds();
    REQUIRE(adjacency_test(*clouds[0], *clouds[1], clouds));
    REQUIRE(adjacency_test(*clouds[1], *clouds[2], clouds));
    REQUIRE_FALSE(adjacency_test(*clouds[0], *clouds[2], clouds));  // middle cloud intervenes
    REQUIRE_THROWS_AS(adjacency_test(*clouds[0], *clouds[0], clouds), DataError);
}

TEST_CASE("a same-class chain merges into one mega-cloud") {
    const DmrModel model = model_from_clouds({{"a", 0.0}, {"a", 1.0}, {"a", 2.0}, {"a", 3.0}});
    const auto megaclouds = merge_megaclouds(model);
    REQUIRE(megaclouds.size() == 1);
    REQUIRE(megaclouds[0].id == 0);
    REQUIRE(megaclouds[0].class_label == "a");
    REQUIRE(megaclouds[0].member_cloud_ids == std::vector<std::int64_t>{0, 1, 2, 3});
}

TEST_CASE("clouds of all-distinct classes never merge") {
    const DmrModel model = model_from_clouds({{"a", 0.0}, {"b", 1.0}, {"c", 2.0}});
    const auto megaclouds = merge_megaclouds(model);
    REQUIRE(megaclouds.size() == 3);
    for (const auto& mc : megaclouds) REQUIRE(mc.member_cloud_ids.size() == 1);
}

TEST_CASE("an interposed cloud of another class blocks the merge") {
    // Class "a" at 0 and 2, class "b" at 1: the midpoint of the "a" pair is
    // closest to the "b" cloud, so the "a" clouds stay separate.
    const DmrModel model = model_from_clouds({{"a", 0.0}, {"a", 2.0}, {"b", 1.0}});
    const auto megaclouds = merge_megaclouds(model);
    REQUIRE(megaclouds.size() == 3);
}

TEST_CASE("mega-cloud ids follow the lowest member id") {
    // Class "b" gets cloud ids 0 and 1, class "a" gets 2 and 3. The order of
    // the merged groups must track member ids, not label order.
    const DmrModel model = model_from_clouds(
        {{"b", 10.0}, {"b", 10.5}, {"a", 0.0}, {"a", 0.5}});
    const auto megaclouds = merge_megaclouds(model);
    REQUIRE(megaclouds.size() == 2);
    REQUIRE(megaclouds[0].id == 0);
    REQUIRE(megaclouds[0].member_cloud_ids == std::vector<std::int64_t>{0, 1});
    REQUIRE(megaclouds[0].class_label == "b");
    REQUIRE(megaclouds[1].id == 1);
    REQUIRE(megaclouds[1].member_cloud_ids == std::vector<std::int64_t>{2, 3});
    REQUIRE(megaclouds[1].class_label == "a");
}

TEST_CASE("the merge result is a partition of the clouds") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::pair<std::string, double>> spec;
        const std::size_t n = 2 + bounded_uint64(rng, 10);
        for (std::size_t i = 0; i < n; ++i) {
            const std::string label(1, static_cast<char>('a' + bounded_uint64(rng, 3)));
            spec.emplace_back(label, 10.0 * standard_gaussian(rng));
        }
        const DmrModel model = model_from_clouds(spec);
        const auto megaclouds = merge_megaclouds(model);

        REQUIRE(megaclouds.size() <= static_cast<std::size_t>(model.cloud_count()));
        std::set<std::int64_t> seen;
        for (const auto& mc : megaclouds) {
            REQUIRE_FALSE(mc.member_cloud_ids.empty());
            for (std::int64_t id : mc.member_cloud_ids) {
                REQUIRE(seen.insert(id).second);
                REQUIRE(model.find_cloud(id)->class_label == mc.class_label);
            }
        }
        REQUIRE(seen.size() == static_cast<std::size_t>(model.cloud_count()));
        for (std::size_t g = 0; g < megaclouds.size(); ++g) {
            REQUIRE(megaclouds[g].id == static_cast<std::int64_t>(g));
        }
    }
}
