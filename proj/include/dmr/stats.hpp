#pragma once

#include <algorithm>
#include <span>

#include "dmr/feature.hpp"

namespace dmr {

/// Floor under per-feature standard deviations; entries below it are treated
/// as constant features and pass through unscaled.
inline constexpr double kStdFloor = 1e-9;

/// Recursive first/second-order statistics of a sample stream.
/// variance is scalar: mean of ||x||^2 minus ||mean||^2, clamped at zero.
struct RunningStats {
    std::int64_t count = 0;
    FeatureVector mean;
    double mean_sq_norm = 0.0;
    double variance = 0.0;

    bool empty() const { return count == 0; }
};

/// Absorb one sample. Streaming result matches the batch statistics of the
/// absorbed set to within numerical noise, independent of order.
inline void update_running_stats(RunningStats& s, const FeatureVector& x) {
    if (!all_finite(x)) throw DataError("update_running_stats: non-finite coordinate");
    if (s.count == 0) {
        s.count = 1;
        s.mean = x;
        s.mean_sq_norm = squared_norm(x);
        s.variance = 0.0;
        return;
    }
    require_same_dim(s.mean, x, "update_running_stats");
    const double n = static_cast<double>(s.count);
    for (std::size_t i = 0; i < x.size(); ++i) {
        s.mean[i] = (n * s.mean[i] + x[i]) / (n + 1.0);
    }
    s.mean_sq_norm = (n * s.mean_sq_norm + squared_norm(x)) / (n + 1.0);
    s.count += 1;
    s.variance = std::max(s.mean_sq_norm - squared_norm(s.mean), 0.0);
}

/// Per-feature z-score parameters, fitted once on the training set and frozen
/// into the model.
struct StandardizationParams {
    FeatureVector per_feature_mean;
    FeatureVector per_feature_std;  // every entry >= kStdFloor

    std::size_t dimension() const { return per_feature_mean.size(); }
};

/// Population mean and population standard deviation per feature.
/// Features with std below kStdFloor get std 1 so constant columns stay inert.
inline StandardizationParams standardize_fit(std::span<const FeatureVector> samples) {
    if (samples.empty()) throw DataError("standardize_fit: no samples");
    const std::size_t dim = samples.front().size();
    for (const auto& x : samples) {
        if (x.size() != dim) throw DataError("standardize_fit: dimension mismatch");
        if (!all_finite(x)) throw DataError("standardize_fit: non-finite coordinate");
    }
    const double n = static_cast<double>(samples.size());
    StandardizationParams p;
    p.per_feature_mean.assign(dim, 0.0);
    p.per_feature_std.assign(dim, 0.0);
    for (const auto& x : samples) {
        for (std::size_t i = 0; i < dim; ++i) p.per_feature_mean[i] += x[i];
    }
    for (std::size_t i = 0; i < dim; ++i) p.per_feature_mean[i] /= n;
    for (const auto& x : samples) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = x[i] - p.per_feature_mean[i];
            p.per_feature_std[i] += d * d;
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        const double sd = std::sqrt(p.per_feature_std[i] / n);
        p.per_feature_std[i] = sd < kStdFloor ? 1.0 : sd;
    }
    return p;
}

inline FeatureVector standardize_apply(const FeatureVector& x, const StandardizationParams& p) {
    require_same_dim(x, p.per_feature_mean, "standardize_apply");
    FeatureVector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        z[i] = (x[i] - p.per_feature_mean[i]) / p.per_feature_std[i];
    }
    return z;
}

}  // namespace dmr
