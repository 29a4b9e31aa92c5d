// Acceptance gate: one self-timed check per shipped guarantee, one PASS/FAIL
// line each. Exits nonzero if any check fails or overruns its budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dmr/dmr.hpp"
#include "test_support.hpp"

using namespace dmr;

namespace {

struct Check {
    bool ok = true;
    std::string detail;
    void expect(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            detail = msg;
        }
    }
};

struct SpecCloud {
    std::string label;
    FeatureVector center;
    std::int64_t support = 1;
    double variance = 1.0;
};

DmrModel build_model(const std::vector<SpecCloud>& spec) {
    std::map<std::string, ClassModel> classes;
    std::int64_t id = 0;
    for (const auto& sc : spec) {
        auto& cm = classes[sc.label];
        cm.class_label = sc.label;
        cm.stats.count += sc.support;
        cm.stats.mean = FeatureVector(sc.center.size(), 0.0);
        cm.stats.variance = 1.0;
        DataCloud cloud = make_cloud(id++, sc.label, sc.center, 1.0, std::nullopt, false);
        cloud.support = sc.support;
        cloud.variance = sc.variance;
        cm.clouds.push_back(std::move(cloud));
    }
    DmrModel m;
    m.dimensionality = spec.front().center.size();
    for (auto& [label, cm] : classes) m.classes.push_back(std::move(cm));
    return m;
}

/// Clouds on coarse grids so exact distance and similarity ties occur often.
std::vector<SpecCloud> random_spec(std::mt19937_64& rng) {
    const std::size_t dim = 1 + bounded_uint64(rng, 3);
    const std::size_t n = 1 + bounded_uint64(rng, 8);
    const char* labels[3] = {"a", "b", "c"};
    std::vector<SpecCloud> spec;
    for (std::size_t i = 0; i < n; ++i) {
        SpecCloud sc;
        sc.label = labels[bounded_uint64(rng, 3)];
        sc.center.resize(dim);
        for (double& v : sc.center) v = 0.5 * static_cast<double>(bounded_uint64(rng, 13)) - 3.0;
        sc.support = 1 + static_cast<std::int64_t>(bounded_uint64(rng, 5));
        sc.variance = bounded_uint64(rng, 2) == 0 ? 1.0 : 0.25 + unit_real(rng);
        spec.push_back(std::move(sc));
    }
    return spec;
}

FeatureVector random_query(std::mt19937_64& rng, std::size_t dim) {
    FeatureVector q(dim);
    for (double& v : q) v = 0.25 * static_cast<double>(bounded_uint64(rng, 25)) - 3.0;
    return q;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Criterion 4 output, audited again by criteria 5 and 11.
std::vector<TrainResult> g_balanced;
std::vector<std::size_t> g_balanced_sizes;

bool density_bounds(std::string& detail) {
    Check ck;
    std::mt19937_64 rng(101);
    for (int i = 0; i < 10000 && ck.ok; ++i) {
        const std::size_t dim = 1 + bounded_uint64(rng, 4);
        FeatureVector center(dim);
        for (double& v : center) v = 4.0 * unit_real(rng) - 2.0;
        const double variance = 0.1 + 2.0 * unit_real(rng);
        FeatureVector x = center;
        const bool at_center = i % 2 == 0;
        if (!at_center) x[0] += 0.5 + unit_real(rng);

        const double d = density(x, center, variance);
        ck.expect(d > 0.0 && d <= 1.0, "density " + fmt(d) + " outside (0,1]");
        ck.expect((d == 1.0) == at_center, "density == 1 exactly iff the query is the center");

        DataCloud cloud = make_cloud(0, "a", center, variance, std::nullopt, false);
        const double s = similarity(x, cloud);
        ck.expect(s > 0.0 && s <= 1.0, "similarity " + fmt(s) + " outside (0,1]");
        ck.expect((s == 1.0) == at_center, "similarity == 1 exactly iff the query is the center");
    }
    detail = ck.detail;
    return ck.ok;
}

bool streaming_stats(std::string& detail) {
    Check ck;
    std::mt19937_64 rng(202);
    for (int t = 0; t < 100 && ck.ok; ++t) {
        const std::size_t len = 1 + bounded_uint64(rng, 500);
        const std::size_t dim = 1 + bounded_uint64(rng, 64);
        std::vector<FeatureVector> xs(len, FeatureVector(dim));
        for (auto& x : xs) {
            for (double& v : x) v = 4.0 * unit_real(rng) - 2.0;
        }

        RunningStats s;
        for (const auto& x : xs) update_running_stats(s, x);

        FeatureVector mean(dim, 0.0);
        double mean_sq = 0.0;
        for (const auto& x : xs) {
            for (std::size_t k = 0; k < dim; ++k) {
                mean[k] += x[k];
                mean_sq += x[k] * x[k];
            }
        }
        for (double& v : mean) v /= static_cast<double>(len);
        mean_sq /= static_cast<double>(len);
        double norm_sq = 0.0;
        for (double v : mean) norm_sq += v * v;
        const double variance = mean_sq - norm_sq;

        ck.expect(s.count == static_cast<std::int64_t>(len), "stream count mismatch");
        for (std::size_t k = 0; k < dim && ck.ok; ++k) {
            ck.expect(std::abs(s.mean[k] - mean[k]) <= 1e-9,
                      "streaming mean off by " + fmt(std::abs(s.mean[k] - mean[k])));
        }
        ck.expect(std::abs(s.mean_sq_norm - mean_sq) <= 1e-9,
                  "streaming mean squared norm off by " + fmt(std::abs(s.mean_sq_norm - mean_sq)));
        ck.expect(std::abs(s.variance - variance) <= 1e-9,
                  "streaming variance off by " + fmt(std::abs(s.variance - variance)));
    }
    detail = ck.detail;
    return ck.ok;
}

bool nearest_prototype_oracle(std::string& detail) {
    Check ck;
    std::mt19937_64 rng(303);
    for (int t = 0; t < 1000 && ck.ok; ++t) {
        const DmrModel model = build_model(random_spec(rng));
        const FeatureVector q = random_query(rng, model.dimensionality);

        // Within one class: minimum squared distance, ties to the lower id.
        const auto& cm = model.classes[bounded_uint64(rng, model.classes.size())];
        std::size_t want = 0;
        for (std::size_t i = 1; i < cm.clouds.size(); ++i) {
            const double di = squared_distance(q, cm.clouds[i].center);
            const double dw = squared_distance(q, cm.clouds[want].center);
            if (di < dw || (di == dw && cm.clouds[i].id < cm.clouds[want].id)) want = i;
        }
        ck.expect(assign_nearest(q, cm.clouds) == want, "assign_nearest disagrees with brute force");

        // Across all classes: maximum similarity, ties to the lower id.
        const DataCloud* best = nullptr;
        double best_s = -1.0;
        for (const DataCloud* cloud : model.all_clouds()) {
            const double s =
                1.0 / (1.0 + squared_distance(q, cloud->center) /
                                 (cloud->variance > 0.0 ? cloud->variance : 1e-6));
            if (s > best_s || (s == best_s && cloud->id < best->id)) {
                best = cloud;
                best_s = s;
            }
        }
        const Prediction p = flat_predict(q, model);
        ck.expect(p.winning_cloud == best->id && p.label == best->class_label && p.score == best_s,
                  "flat_predict disagrees with brute force");
    }
    detail = ck.detail;
    return ck.ok;
}

bool balance_guarantee(std::string& detail) {
    Check ck;
    std::mt19937_64 pick(404);
    const std::size_t choices[3] = {200, 50, 10};
    for (int t = 0; t < 20; ++t) {
        const std::vector<std::size_t> sizes{choices[bounded_uint64(pick, 3)],
                                             choices[bounded_uint64(pick, 3)],
                                             choices[bounded_uint64(pick, 3)]};
        const Dataset ds =
            testsupport::make_blobs({{0.0, 0.0}, {6.0, 0.0}, {3.0, 5.0}}, sizes, {"a", "b", "c"},
                                    0.6, derive_seed(77, static_cast<std::uint64_t>(t)));
        TrainOptions opt;
        opt.balance = true;
        opt.seed = derive_seed(99, static_cast<std::uint64_t>(t));
        TrainResult tr = train_model(ds, opt);
        validate_model(tr.model);

        const std::string tag = " (fixture " + std::to_string(t) + ")";
        const std::size_t want = tr.model.classes.front().clouds.size();
        for (const auto& cm : tr.model.classes) {
            ck.expect(cm.clouds.size() == want, "per-class prototype counts differ" + tag);
        }
        ck.expect(tr.balance_report.warnings.empty(), "balancing warned" + tag);
        ck.expect(!tr.balance_report.cap_fired(), "generation cap fired" + tag);

        g_balanced_sizes.push_back(ds.size());
        g_balanced.push_back(std::move(tr));
    }
    detail = ck.detail;
    return ck.ok;
}

bool interpolation_envelope(std::string& detail) {
    Check ck;
    ck.expect(!g_balanced.empty(), "no balanced fixtures to audit");
    std::size_t audited = 0;
    for (const auto& tr : g_balanced) {
        for (const auto& s : tr.synthetic) {
            ++audited;
            for (std::size_t d = 0; d < s.features.size() && ck.ok; ++d) {
                const double lo = std::min(s.p_hat[d], s.q_hat[d]);
                const double hi = std::max(s.p_hat[d], s.q_hat[d]);
                ck.expect(s.features[d] >= lo && s.features[d] <= hi,
                          "synthetic coordinate " + fmt(s.features[d]) + " outside [" + fmt(lo) +
                              ", " + fmt(hi) + "]");
            }
        }
    }
    ck.expect(audited > 0, "no synthetic samples were generated across the fixtures");
    detail = ck.detail;
    return ck.ok;
}

bool disturbance_calibration(std::string& detail) {
    Check ck;
    std::mt19937_64 rng(606);
    const double sigma = 0.8;
    SeedPair pair;
    pair.p = {1.0, -2.0};
    pair.q = {0.25, 3.0};
    const int draws = 10000;
    double sum[2] = {0.0, 0.0};
    double sum_sq[2] = {0.0, 0.0};
    for (int i = 0; i < draws; ++i) {
        const auto [p_hat, q_hat] = perturb_pair(pair, sigma, rng);
        for (std::size_t d = 0; d < 2; ++d) {
            const double dp = p_hat[d] - pair.p[d];
            const double dq = q_hat[d] - pair.q[d];
            sum[d] += dp + dq;
            sum_sq[d] += dp * dp + dq * dq;
        }
    }
    const double n = 2.0 * draws;
    for (std::size_t d = 0; d < 2; ++d) {
        const double mean = sum[d] / n;
        const double stddev = std::sqrt(sum_sq[d] / n - mean * mean);
        ck.expect(stddev >= 0.95 * sigma && stddev <= 1.05 * sigma,
                  "coordinate " + std::to_string(d) + " empirical std " + fmt(stddev) +
                      " not within 5% of " + fmt(sigma));
    }
    detail = ck.detail;
    return ck.ok;
}

bool megacloud_partition(std::string& detail) {
    Check ck;

    const DmrModel chain =
        build_model({{"a", {0.0}}, {"a", {1.0}}, {"a", {2.0}}, {"a", {3.0}}});
    const auto chain_mg = merge_megaclouds(chain);
    ck.expect(chain_mg.size() == 1, "same-class chain did not merge into one mega-cloud");

    const DmrModel distinct = build_model({{"a", {0.0}}, {"b", {1.0}}, {"c", {2.0}}});
    ck.expect(merge_megaclouds(distinct).size() ==
                  static_cast<std::size_t>(distinct.cloud_count()),
              "all-distinct classes did not stay singleton mega-clouds");

    std::mt19937_64 rng(707);
    for (int t = 0; t < 30 && ck.ok; ++t) {
        const DmrModel model = build_model(random_spec(rng));
        const auto megaclouds = merge_megaclouds(model);
        const auto n_clouds = static_cast<std::size_t>(model.cloud_count());
        ck.expect(megaclouds.size() <= n_clouds, "more mega-clouds than prototypes");
        std::set<std::int64_t> seen;
        for (const auto& mc : megaclouds) {
            for (std::int64_t id : mc.member_cloud_ids) {
                ck.expect(seen.insert(id).second, "cloud assigned to two mega-clouds");
                const DataCloud* cloud = model.find_cloud(id);
                ck.expect(cloud != nullptr && cloud->class_label == mc.class_label,
                          "mega-cloud member of the wrong class");
            }
        }
        ck.expect(seen.size() == n_clouds, "mega-clouds do not cover every prototype");
    }
    detail = ck.detail;
    return ck.ok;
}

bool cascade_semantics(std::string& detail) {
    Check ck;
    DmrModel model = build_model(
        {{"a", {0.0}}, {"b", {10.0}}, {"a", {20.0}, 5}, {"b", {30.0}}});
    const std::vector<FeatureVector> xs{{0.0}, {10.0}, {20.0}, {30.0}};
    const std::vector<std::string> labels{"a", "b", "a", "b"};
    model.ranking = rank_prototypes(model, xs, labels);
    ck.expect(model.ranking.order.front() == 2, "unexpected top-ranked prototype");

    for (const double thr : {0.0, 0.3, 0.9, 1.0}) {
        const Prediction p = cascade_predict({20.0}, model, thr);
        ck.expect(p.label == "a" && p.score == 1.0 && p.fired_pair == std::size_t{0},
                  "exact hit on the top prototype did not win at threshold " + fmt(thr));
    }

    const DataCloud* first = model.find_cloud(model.ranking.order[0]);
    const DataCloud* second = model.find_cloud(model.ranking.order[1]);
    for (const double x : {-5.0, 3.0, 12.0, 25.0, 31.0}) {
        const Prediction p = cascade_predict({x}, model, 0.0);
        const PairwiseWinner w = pairwise_max({x}, *first, *second);
        ck.expect(p.fired_pair == std::size_t{0} && p.winning_cloud == w.cloud_id &&
                      p.score == w.score,
                  "zero threshold did not reproduce the first-pair winner at x=" + fmt(x));
    }

    for (const double x : {5.0, 15.0, 25.0}) {
        const Prediction p = cascade_predict({x}, model, 0.9);
        const Prediction f = flat_predict({x}, model);
        ck.expect(!p.fired_pair.has_value() && p.label == f.label &&
                      p.winning_cloud == f.winning_cloud && p.score == f.score,
                  "below-threshold query did not fall back to the flat decision at x=" + fmt(x));
    }
    detail = ck.detail;
    return ck.ok;
}

bool classification_quality(std::string& detail) {
    Check ck;
    const std::vector<FeatureVector> centers{{0.0, 0.0, 0.0, 0.0, 0.0},
                                             {8.0, 0.0, 0.0, 0.0, 0.0},
                                             {0.0, 8.0, 0.0, 0.0, 0.0}};
    const Dataset ds =
        testsupport::make_blobs(centers, {200, 50, 10}, {"maj", "mid", "min"}, 1.0, 909);

    EvalConfig cfg;
    cfg.seed = 313;
    const EvalReport plain = evaluate(ds, cfg);
    EvalConfig balanced_cfg = cfg;
    balanced_cfg.balance = true;
    const EvalReport balanced = evaluate(ds, balanced_cfg);

    std::size_t hits = 0;
    std::size_t total = 0;
    for (const auto& split : evaluation_splits(ds, cfg)) {
        for (std::size_t i : split.test) {
            ++total;
            if (testsupport::nearest_neighbor_label(ds, split.train, ds.samples[i]) ==
                ds.labels[i]) {
                ++hits;
            }
        }
    }
    const double nn_accuracy = static_cast<double>(hits) / static_cast<double>(total);

    ck.expect(std::abs(plain.accuracy - nn_accuracy) <= 0.03,
              "accuracy " + fmt(plain.accuracy) + " vs 1-NN " + fmt(nn_accuracy) +
                  " differs by more than 3 points");
    const double min_plain = plain.per_class_accuracy.at("min");
    const double min_balanced = balanced.per_class_accuracy.at("min");
    ck.expect(min_balanced >= min_plain, "minority recall dropped with balancing: " +
                                             fmt(min_balanced) + " < " + fmt(min_plain));
    detail = ck.detail;
    return ck.ok;
}

bool determinism_and_persistence(std::string& detail) {
    Check ck;
    const Dataset ds =
        testsupport::make_blobs({{0.0, 0.0}, {5.0, 5.0}}, {120, 30}, {"x", "y"}, 0.5, 1010);
    TrainOptions opt;
    opt.balance = true;
    opt.seed = 4242;

    const auto dir = testsupport::scratch_dir("accept");
    const std::string path_a = (dir / "a.json").string();
    const std::string path_b = (dir / "b.json").string();
    const TrainResult first = train_model(ds, opt);
    save_model(first.model, path_a);
    save_model(train_model(ds, opt).model, path_b);
    ck.expect(testsupport::read_file(path_a) == testsupport::read_file(path_b),
              "same seed produced different model files");

    const DmrModel loaded = load_model(path_a);
    std::mt19937_64 rng(555);
    int flips = 0;
    for (int i = 0; i < 500; ++i) {
        const FeatureVector q{9.0 * unit_real(rng) - 2.0, 9.0 * unit_real(rng) - 2.0};
        const FeatureVector x = standardize_apply(q, first.model.standardization);
        const Prediction before = cascade_predict(x, first.model);
        const Prediction after = cascade_predict(x, loaded);
        if (before.label != after.label || before.winning_cloud != after.winning_cloud ||
            before.score != after.score || before.fired_pair != after.fired_pair) {
            ++flips;
        }
    }
    ck.expect(flips == 0, std::to_string(flips) + " of 500 probe predictions changed after the round trip");

    const std::string path_c = (dir / "c.json").string();
    save_model(loaded, path_c);
    ck.expect(testsupport::read_file(path_c) == testsupport::read_file(path_a),
              "re-serializing the loaded model changed its bytes");
    detail = ck.detail;
    return ck.ok;
}

bool rule_export(std::string& detail) {
    Check ck;
    ck.expect(!g_balanced.empty(), "no balanced fixtures to audit");

    const Dataset ds =
        testsupport::make_blobs({{0.0, 0.0}, {5.0, 5.0}}, {40, 25}, {"p", "q"}, 0.5, 1111);
    const TrainResult plain = train_model(ds);

    std::vector<std::pair<const DmrModel*, std::size_t>> fixtures;
    for (std::size_t i = 0; i < g_balanced.size(); ++i) {
        fixtures.emplace_back(&g_balanced[i].model, g_balanced_sizes[i]);
    }
    fixtures.emplace_back(&plain.model, ds.size());

    for (const auto& [model, n_samples] : fixtures) {
        const auto rules = export_rules(*model);
        ck.expect(rules.size() == model->megaclouds.size(), "rule count != mega-cloud count");
        for (std::size_t r = 0; r < rules.size() && ck.ok; ++r) {
            const auto& rule = rules[r];
            const auto& mc = model->megaclouds[r];
            ck.expect(rule.mega_cloud_id == mc.id && rule.class_label == mc.class_label,
                      "rule does not mirror its mega-cloud");
            ck.expect(rule.antecedents.size() == mc.member_cloud_ids.size(),
                      "rule antecedent count != mega-cloud member count");
            for (const auto& a : rule.antecedents) {
                const DataCloud* cloud = model->find_cloud(a.cloud_id);
                ck.expect(cloud != nullptr, "antecedent references a missing prototype");
                if (cloud == nullptr) break;
                ck.expect(cloud->class_label == rule.class_label,
                          "antecedent prototype of the wrong class");
                ck.expect(a.synthetic == cloud->synthetic, "synthetic flag mismatch");
                if (!a.synthetic) {
                    ck.expect(a.source_sample_id.has_value() && *a.source_sample_id >= 0 &&
                                  *a.source_sample_id < static_cast<std::int64_t>(n_samples),
                              "real prototype lacks a valid source row");
                }
            }
        }
    }
    detail = ck.detail;
    return ck.ok;
}

struct Criterion {
    int number;
    const char* name;
    double limit_seconds;  // <= 0: no budget
    std::function<bool(std::string&)> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "density and similarity stay in (0,1] and hit 1 only at the center", 1.0,
         density_bounds},
        {2, "streaming statistics match batch computation within 1e-9", 5.0, streaming_stats},
        {3, "nearest-prototype decisions match brute force, ties included", 5.0,
         nearest_prototype_oracle},
        {4, "balancing equalizes per-class prototype counts on 20 imbalanced fixtures", 30.0,
         balance_guarantee},
        {5, "every synthetic coordinate lies between its disturbed endpoints", 0.0,
         interpolation_envelope},
        {6, "per-coordinate disturbance std stays within 5% of sigma", 2.0,
         disturbance_calibration},
        {7, "mega-cloud merging always yields a same-class partition", 2.0, megacloud_partition},
        {8, "cascade: exact hit wins at any threshold, zero threshold takes the first pair, "
            "otherwise the flat fallback answers", 1.0, cascade_semantics},
        {9, "blob benchmark within 3 points of 1-NN and balancing never hurts minority recall",
         60.0, classification_quality},
        {10, "equal seeds give identical model files and the round trip flips no predictions",
         10.0, determinism_and_persistence},
        {11, "one rule per mega-cloud, every antecedent resolvable with valid provenance", 1.0,
         rule_export},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("unexpected exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const bool in_time = c.limit_seconds <= 0.0 || seconds < c.limit_seconds;
        const bool pass = ok && in_time;
        if (!pass) ++failed;

        std::string timing = " [" + fmt(seconds) + " s";
        timing += c.limit_seconds > 0.0 ? ", limit " + fmt(c.limit_seconds) + " s]" : "]";
        std::string line = std::string(pass ? "PASS" : "FAIL") + " criterion " +
                           std::to_string(c.number) + ": " + c.name + timing;
        if (!ok) line += " -- " + detail;
        if (ok && !in_time) line += " -- time limit exceeded";
        std::printf("%s\n", line.c_str());
    }

    if (failed == 0) {
        std::printf("all %zu criteria passed\n", criteria.size());
    } else {
        std::printf("%d of %zu criteria FAILED\n", failed, criteria.size());
    }
    return failed == 0 ? 0 : 1;
}
