#pragma once

#include <utility>

#include "dmr/learner.hpp"
#include "dmr/rng.hpp"

namespace dmr {

/// Radius factor of the seed-selection zone around a prototype, in units of
/// the cloud's local standard deviation.
inline constexpr double kSeedZoneFactor = 0.3;

/// Two training samples picked near one prototype, the raw material for one
/// synthetic sample.
struct SeedPair {
    FeatureVector p;
    FeatureVector q;
    std::int64_t cloud_id = 0;
};

/// One generated sample, with the disturbed endpoints that bracket it so the
/// interpolation envelope can be audited after the fact.
struct SyntheticSample {
    FeatureVector features;
    std::string class_label;
    std::int64_t source_cloud_id = 0;  // prototype the sample was generated around
    FeatureVector p_hat;
    FeatureVector q_hat;
};

/// Per-class shortfall against the largest per-class cloud count. Balancing
/// every class up to the common maximum makes all pairwise differences zero.
inline std::map<std::string, std::int64_t> compute_deficits(const DmrModel& model) {
    if (model.classes.empty()) throw DataError("compute_deficits: no classes");
    std::int64_t target = 0;
    for (const auto& cm : model.classes) {
        target = std::max(target, static_cast<std::int64_t>(cm.clouds.size()));
    }
    std::map<std::string, std::int64_t> deficits;
    for (const auto& cm : model.classes) {
        deficits[cm.class_label] = target - static_cast<std::int64_t>(cm.clouds.size());
    }
    return deficits;
}

/// Uniformly random distinct pair among the members inside the 0.3-sigma zone
/// of the cloud. Degenerate fallbacks: fewer than two in-zone members gives
/// (center, nearest member); no members at all gives (center, center).
inline SeedPair select_seed_pair(const DataCloud& cloud, std::span<const FeatureVector> members,
                                 std::mt19937_64& rng) {
    SeedPair pair;
    pair.cloud_id = cloud.id;
    const double sigma = std::sqrt(effective_variance(cloud));
    const double zone_sq = (kSeedZoneFactor * sigma) * (kSeedZoneFactor * sigma);

    std::vector<std::size_t> in_zone;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (squared_distance(members[i], cloud.center) <= zone_sq) in_zone.push_back(i);
    }
    if (in_zone.size() >= 2) {
        const std::size_t a = static_cast<std::size_t>(bounded_uint64(rng, in_zone.size()));
        std::size_t b = static_cast<std::size_t>(bounded_uint64(rng, in_zone.size() - 1));
        if (b >= a) ++b;
        pair.p = members[in_zone[a]];
        pair.q = members[in_zone[b]];
        return pair;
    }
    if (!members.empty()) {
        std::size_t nearest = 0;
        double best = squared_distance(members[0], cloud.center);
        for (std::size_t i = 1; i < members.size(); ++i) {
            const double d = squared_distance(members[i], cloud.center);
            if (d < best) {
                nearest = i;
                best = d;
            }
        }
        pair.p = cloud.center;
        pair.q = members[nearest];
        return pair;
    }
    pair.p = cloud.center;
    pair.q = cloud.center;
    return pair;
}

/// Independent zero-mean Gaussian disturbance of standard deviation sigma on
/// every coordinate of both points.
inline std::pair<FeatureVector, FeatureVector> perturb_pair(const SeedPair& pair, double sigma,
                                                            std::mt19937_64& rng) {
    if (sigma < 0.0) throw DataError("perturb_pair: negative sigma");
    require_same_dim(pair.p, pair.q, "perturb_pair");
    std::pair<FeatureVector, FeatureVector> out{pair.p, pair.q};
    if (sigma == 0.0) return out;
    for (double& v : out.first) v += sigma * standard_gaussian(rng);
    for (double& v : out.second) v += sigma * standard_gaussian(rng);
    return out;
}

/// Deterministic core of the random interpolation: one mixing weight per
/// coordinate. Results are clamped to the closed interval spanned by the
/// endpoints so the envelope holds exactly, floating point included.
inline FeatureVector interpolate_at(const FeatureVector& p_hat, const FeatureVector& q_hat,
                                    const FeatureVector& alpha) {
    require_same_dim(p_hat, q_hat, "interpolate");
    require_same_dim(p_hat, alpha, "interpolate");
    FeatureVector rho(p_hat.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double lo = std::min(p_hat[i], q_hat[i]);
        const double hi = std::max(p_hat[i], q_hat[i]);
        rho[i] = std::clamp(alpha[i] * p_hat[i] + (1.0 - alpha[i]) * q_hat[i], lo, hi);
    }
    return rho;
}

/// Random interpolation with per-coordinate uniform [0,1] weights.
inline FeatureVector interpolate(const FeatureVector& p_hat, const FeatureVector& q_hat,
                                 std::mt19937_64& rng) {
    FeatureVector alpha(p_hat.size());
    for (double& a : alpha) a = unit_real(rng);
    return interpolate_at(p_hat, q_hat, alpha);
}

struct BalanceOptions {
    std::int64_t cap_multiplier = 1000;  // generated-sample budget per class: cap x initial deficit
    std::uint64_t seed = 0;
};

struct BalanceClassOutcome {
    std::string class_label;
    std::int64_t initial_clouds = 0;
    std::int64_t target = 0;
    std::int64_t generated = 0;   // synthetic samples fed through the learner
    std::int64_t promoted = 0;    // cap fallback: samples promoted straight to clouds
    std::int64_t residual_deficit = 0;
};

struct BalanceReport {
    std::vector<BalanceClassOutcome> classes;  // deficit classes only
    std::vector<std::string> warnings;

    bool cap_fired() const { return !warnings.empty(); }
};

struct BalanceResult {
    std::vector<SyntheticSample> synthetic;
    BalanceReport report;
};

/// Equalize per-class cloud counts by generating synthetic samples around the
/// deficit classes' prototypes and feeding them through those classes' own
/// streaming learners. Cycles over the class's clouds (including ones created
/// on the way); stops when the class reaches the common target or the budget
/// runs out. On budget exhaustion the densest generated samples that did not
/// already seed a cloud are promoted directly until the count matches, and a
/// warning is recorded.
///
/// members maps cloud id to that cloud's absorbed samples and is kept up to
/// date as synthetic samples land. Other classes' models are never touched.
/// The random stream is derived per class from the seed, so the whole run is
/// reproducible and class-order independent.
inline BalanceResult balance_classes(DmrModel& model,
                                     std::map<std::int64_t, std::vector<FeatureVector>>& members,
                                     const BalanceOptions& opt = {}) {
    const auto deficits = compute_deficits(model);
    std::int64_t target = 0;
    for (const auto& cm : model.classes) {
        target = std::max(target, static_cast<std::int64_t>(cm.clouds.size()));
    }

    BalanceResult result;
    std::int64_t next_id = model.next_cloud_id();

    for (auto& cm : model.classes) {
        const std::int64_t deficit = deficits.at(cm.class_label);
        if (deficit <= 0) continue;

        std::mt19937_64 rng(derive_seed(opt.seed, fnv1a(cm.class_label)));
        const std::int64_t cap = opt.cap_multiplier * deficit;

        BalanceClassOutcome outcome;
        outcome.class_label = cm.class_label;
        outcome.initial_clouds = static_cast<std::int64_t>(cm.clouds.size());
        outcome.target = target;

        std::vector<std::size_t> not_created;  // indices into result.synthetic for this class
        std::size_t cycle = 0;
        while (static_cast<std::int64_t>(cm.clouds.size()) < target && outcome.generated < cap) {
            const std::size_t k = cycle++ % cm.clouds.size();
            const std::int64_t around_id = cm.clouds[k].id;
            const double sigma = std::sqrt(effective_variance(cm.clouds[k]));

            const auto it = members.find(around_id);
            const std::span<const FeatureVector> cloud_members =
                it == members.end() ? std::span<const FeatureVector>{} : std::span<const FeatureVector>(it->second);
            const SeedPair pair = select_seed_pair(cm.clouds[k], cloud_members, rng);
            const auto [p_hat, q_hat] = perturb_pair(pair, sigma, rng);
            FeatureVector rho = interpolate(p_hat, q_hat, rng);

            const AbsorbResult landed =
                absorb_sample(cm, rho, next_id, std::nullopt, /*synthetic=*/true);
            outcome.generated += 1;

            SyntheticSample record;
            record.features = rho;
            record.class_label = cm.class_label;
            record.source_cloud_id = around_id;
            record.p_hat = p_hat;
            record.q_hat = q_hat;

            if (landed.created) {
                members[next_id] = {std::move(rho)};
                ++next_id;
            } else {
                members[cm.clouds[landed.cloud_index].id].push_back(std::move(rho));
                not_created.push_back(result.synthetic.size());
            }
            result.synthetic.push_back(std::move(record));
        }

        if (static_cast<std::int64_t>(cm.clouds.size()) < target) {
            // Budget exhausted: promote the densest leftover samples outright.
            const double var = std::max(cm.stats.variance, kVarianceFloor);
            std::stable_sort(not_created.begin(), not_created.end(),
                             [&](std::size_t a, std::size_t b) {
                                 return density(result.synthetic[a].features, cm.stats.mean, var) >
                                        density(result.synthetic[b].features, cm.stats.mean, var);
                             });
            for (std::size_t idx : not_created) {
                if (static_cast<std::int64_t>(cm.clouds.size()) >= target) break;
                const FeatureVector& rho = result.synthetic[idx].features;
                cm.clouds.push_back(make_cloud(next_id, cm.class_label, rho, cm.stats.variance,
                                               std::nullopt, /*synthetic=*/true));
                members[next_id] = {rho};
                ++next_id;
                outcome.promoted += 1;
            }
            outcome.residual_deficit = target - static_cast<std::int64_t>(cm.clouds.size());
            result.report.warnings.push_back(
                "class \"" + cm.class_label + "\": budget of " + std::to_string(cap) +
                " synthetic samples exhausted; promoted " + std::to_string(outcome.promoted) +
                ", residual deficit " + std::to_string(outcome.residual_deficit));
        }

        result.report.classes.push_back(std::move(outcome));
    }
    return result;
}

}  // namespace dmr
