#pragma once

#include <map>
#include <vector>

#include "dmr/cloud.hpp"

namespace dmr {

inline constexpr int kModelFormatVersion = 1;
inline constexpr double kDefaultThreshold = 0.9;

/// Union of adjacent same-class clouds; one IF-THEN rule per mega-cloud.
struct MegaCloud {
    std::int64_t id = 0;
    std::string class_label;
    std::vector<std::int64_t> member_cloud_ids;  // sorted ascending
};

/// Cloud ids ordered by ascending training error, ties broken by descending
/// support then ascending id.
struct RankedPrototypes {
    std::vector<std::int64_t> order;
    std::map<std::int64_t, double> per_cloud_error;

    bool empty() const { return order.empty(); }
};

/// Settings the model was produced with; recorded for reproducibility.
struct Provenance {
    std::uint64_t seed = 0;
    bool balance = false;
    std::int64_t balance_cap = 1000;
};

/// The complete trained classifier.
struct DmrModel {
    int format_version = kModelFormatVersion;
    std::size_t dimensionality = 0;
    StandardizationParams standardization;
    std::vector<ClassModel> classes;  // sorted by label
    std::vector<MegaCloud> megaclouds;
    RankedPrototypes ranking;
    double threshold = kDefaultThreshold;
    Provenance provenance;

    std::int64_t cloud_count() const {
        std::int64_t n = 0;
        for (const auto& c : classes) n += static_cast<std::int64_t>(c.clouds.size());
        return n;
    }

    const DataCloud* find_cloud(std::int64_t id) const {
        for (const auto& c : classes) {
            for (const auto& cl : c.clouds) {
                if (cl.id == id) return &cl;
            }
        }
        return nullptr;
    }

    /// First id not yet taken by any cloud.
    std::int64_t next_cloud_id() const {
        std::int64_t next = 0;
        for (const auto& c : classes) {
            for (const auto& cl : c.clouds) next = std::max(next, cl.id + 1);
        }
        return next;
    }

    std::vector<const DataCloud*> all_clouds() const {
        std::vector<const DataCloud*> out;
        out.reserve(static_cast<std::size_t>(cloud_count()));
        for (const auto& c : classes) {
            for (const auto& cl : c.clouds) out.push_back(&cl);
        }
        return out;
    }
};

}  // namespace dmr
