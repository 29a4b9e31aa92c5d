#pragma once

#include "dmr/model.hpp"

namespace dmr {

/// Floor substituted for degenerate (zero) cloud variance.
inline constexpr double kVarianceFloor = 1e-6;

/// Cauchy data density: 1 / (1 + ||x - center||^2 / variance).
/// Always in (0, 1]; equals 1 exactly when x == center.
inline double density(const FeatureVector& x, const FeatureVector& center, double variance) {
    if (!(variance > 0.0)) throw DataError("density: degenerate scale");
    return 1.0 / (1.0 + squared_distance(x, center) / variance);
}

inline double effective_variance(const DataCloud& cloud) {
    return cloud.variance > 0.0 ? cloud.variance : kVarianceFloor;
}

/// Similarity of a query to a prototype: the same Cauchy form as the data
/// density, scaled by the cloud's local variance.
inline double similarity(const FeatureVector& x, const DataCloud& cloud) {
    return density(x, cloud.center, effective_variance(cloud));
}

/// Empirical conditional probability of each class given x: support-weighted
/// similarity sums, normalized across classes. Diagnostic output; the decision
/// path does not use it.
struct ClassTypicality {
    std::map<std::string, double> per_class;
};

inline ClassTypicality class_typicality(const FeatureVector& x, const DmrModel& model) {
    ClassTypicality t;
    double total = 0.0;
    for (const auto& cm : model.classes) {
        double score = 0.0;
        for (const auto& cloud : cm.clouds) {
            score += static_cast<double>(cloud.support) * similarity(x, cloud);
        }
        t.per_class[cm.class_label] = score;
        total += score;
    }
    if (t.per_class.empty() || total <= 0.0) throw ModelError("class_typicality: empty model");
    for (auto& [label, score] : t.per_class) score /= total;
    return t;
}

}  // namespace dmr
