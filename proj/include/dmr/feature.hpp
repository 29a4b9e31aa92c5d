#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmr {

/// Dense real-valued feature vector; every sample, prototype center and
/// synthetic point in the library is one of these.
using FeatureVector = std::vector<double>;

/// Malformed input: CSV rows, dimension mismatches, empty streams.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Broken model file: unsupported version, dangling references, bad schema.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(const FeatureVector& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline void require_same_dim(const FeatureVector& a, const FeatureVector& b, const char* where) {
    if (a.size() != b.size()) {
        throw DataError(std::string(where) + ": dimension mismatch (" +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

inline double squared_norm(const FeatureVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

/// Squared Euclidean distance.
inline double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    require_same_dim(a, b, "squared_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace dmr
