#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmr/stats.hpp"

namespace dmr {

/// A prototype and the local statistics of the samples it has absorbed.
/// The center is the running mean of the members; variance is the members'
/// mean squared norm minus the squared center norm, clamped at zero. While
/// support == 1 the variance holds the substituted scale chosen at creation
/// (the class variance at that moment, floored).
struct DataCloud {
    std::int64_t id = 0;
    std::string class_label;
    FeatureVector center;
    std::int64_t support = 1;
    double mean_sq_norm = 0.0;
    double variance = 0.0;
    std::optional<std::int64_t> source_sample_id;  // dataset row that seeded the cloud
    bool synthetic = false;                        // seeded by a generated sample
};

/// One class's stream statistics plus its prototypes, in creation order.
struct ClassModel {
    std::string class_label;
    RunningStats stats;
    std::vector<DataCloud> clouds;
};

}  // namespace dmr
