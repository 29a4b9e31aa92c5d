#pragma once

#include <span>

#include "dmr/density.hpp"

namespace dmr {

/// Where a sample landed: the cloud index within the class, and whether the
/// sample seeded a new cloud.
struct AbsorbResult {
    std::size_t cloud_index = 0;
    bool created = false;
};

inline DataCloud make_cloud(std::int64_t id, const std::string& label, const FeatureVector& x,
                            double substituted_variance,
                            std::optional<std::int64_t> source_sample_id, bool synthetic) {
    DataCloud c;
    c.id = id;
    c.class_label = label;
    c.center = x;
    c.support = 1;
    c.mean_sq_norm = squared_norm(x);
    c.variance = std::max(substituted_variance, kVarianceFloor);
    c.source_sample_id = source_sample_id;
    c.synthetic = synthetic;
    return c;
}

/// Index of the cloud whose center minimizes squared distance to x.
/// Exact ties go to the lowest id, i.e. the earliest-created cloud.
inline std::size_t assign_nearest(const FeatureVector& x, std::span<const DataCloud> clouds) {
    if (clouds.empty()) throw DataError("assign_nearest: empty cloud list");
    std::size_t best = 0;
    double best_d = squared_distance(x, clouds[0].center);
    for (std::size_t i = 1; i < clouds.size(); ++i) {
        const double d = squared_distance(x, clouds[i].center);
        if (d < best_d || (d == best_d && clouds[i].id < clouds[best].id)) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

/// Fold one assigned sample into a prototype: support grows by one, the center
/// moves to the running mean, local variance is recomputed from the members'
/// mean squared norm and clamped at zero.
inline void update_prototype(DataCloud& cloud, const FeatureVector& x) {
    require_same_dim(cloud.center, x, "update_prototype");
    const double n = static_cast<double>(cloud.support);
    for (std::size_t i = 0; i < x.size(); ++i) {
        cloud.center[i] = (n * cloud.center[i] + x[i]) / (n + 1.0);
    }
    cloud.mean_sq_norm = (n * cloud.mean_sq_norm + squared_norm(x)) / (n + 1.0);
    cloud.support += 1;
    cloud.variance = std::max(cloud.mean_sq_norm - squared_norm(cloud.center), 0.0);
}

/// New-prototype condition: the sample's density is at or beyond every
/// prototype's density, on either side. Densities use the class's current
/// global mean/variance, i.e. the stats AFTER absorbing x.
///
/// When the class variance is zero every sample seen so far is identical to
/// the prototypes, so the density comparison is vacuous and the sample is
/// treated as not novel.
inline bool novelty_check(const FeatureVector& x, const ClassModel& m) {
    if (m.clouds.empty()) throw DataError("novelty_check: no clouds");
    if (!(m.stats.variance > 0.0)) return false;
    const double dx = density(x, m.stats.mean, m.stats.variance);
    double dmin = 1.0, dmax = 0.0;
    for (const auto& cloud : m.clouds) {
        const double d = density(cloud.center, m.stats.mean, m.stats.variance);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    return dx >= dmax || dx <= dmin;
}

/// One streaming step of the per-class learning procedure: absorb the sample
/// into the class stats, then either seed a new cloud (first sample, or the
/// novelty condition fires) or update the nearest prototype. new_cloud_id is
/// used only when a cloud is created.
inline AbsorbResult absorb_sample(ClassModel& m, const FeatureVector& x, std::int64_t new_cloud_id,
                                  std::optional<std::int64_t> source_sample_id = std::nullopt,
                                  bool synthetic = false) {
    update_running_stats(m.stats, x);
    if (m.clouds.empty() || novelty_check(x, m)) {
        m.clouds.push_back(
            make_cloud(new_cloud_id, m.class_label, x, m.stats.variance, source_sample_id, synthetic));
        return {m.clouds.size() - 1, true};
    }
    const std::size_t idx = assign_nearest(x, m.clouds);
    update_prototype(m.clouds[idx], x);
    return {idx, false};
}

/// Run the streaming procedure over an ordered, already-standardized sample
/// stream. Cloud ids are the per-class creation indices 0..M-1; the pipeline
/// remaps them to model-global ids. When source_ids is empty, stream positions
/// are used.
inline ClassModel learn_class(std::span<const FeatureVector> samples, const std::string& label,
                              std::span<const std::int64_t> source_ids = {}) {
    if (samples.empty()) throw DataError("learn_class: empty stream");
    if (!source_ids.empty() && source_ids.size() != samples.size()) {
        throw DataError("learn_class: source id count mismatch");
    }
    ClassModel m;
    m.class_label = label;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::int64_t sid = source_ids.empty() ? static_cast<std::int64_t>(i) : source_ids[i];
        absorb_sample(m, samples[i], static_cast<std::int64_t>(m.clouds.size()), sid, false);
    }
    return m;
}

}  // namespace dmr
