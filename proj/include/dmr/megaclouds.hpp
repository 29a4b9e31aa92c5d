#pragma once

#include <algorithm>
#include <numeric>

#include "dmr/model.hpp"

namespace dmr {

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t u) {
        while (parent_[u] != u) {
            parent_[u] = parent_[parent_[u]];
            u = parent_[u];
        }
        return u;
    }

    void unite(std::size_t u, std::size_t v) { parent_[find(u)] = find(v); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Empirical neighbor test: a and b are adjacent iff the two cloud centers
/// nearest to their midpoint are exactly a and b. Distance ties resolve to the
/// lower cloud id. A one-way approximation of tessellation adjacency that
/// stays tractable in high dimension.
inline bool adjacency_test(const DataCloud& a, const DataCloud& b,
                           std::span<const DataCloud* const> all_clouds) {
    if (a.id == b.id) throw DataError("adjacency_test: identical clouds");
    FeatureVector mid(a.center.size());
    require_same_dim(a.center, b.center, "adjacency_test");
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a.center[i] + b.center[i]);

    // two smallest (distance, id) pairs over all centers
    const DataCloud* first = nullptr;
    const DataCloud* second = nullptr;
    double d1 = 0.0, d2 = 0.0;
    for (const DataCloud* c : all_clouds) {
        const double d = squared_distance(mid, c->center);
        const bool before_first = first == nullptr || d < d1 || (d == d1 && c->id < first->id);
        if (before_first) {
            second = first;
            d2 = d1;
            first = c;
            d1 = d;
        } else if (second == nullptr || d < d2 || (d == d2 && c->id < second->id)) {
            second = c;
            d2 = d;
        }
    }
    if (first == nullptr || second == nullptr) return false;
    return (first->id == a.id && second->id == b.id) || (first->id == b.id && second->id == a.id);
}

/// Connected components of the graph whose edges join same-class adjacent
/// cloud pairs. Components are numbered by ascending lowest member cloud id;
/// member lists are sorted. Every cloud lands in exactly one mega-cloud.
inline std::vector<MegaCloud> merge_megaclouds(const DmrModel& model) {
    const std::vector<const DataCloud*> clouds = model.all_clouds();
    const std::size_t n = clouds.size();
    detail::UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (clouds[i]->class_label != clouds[j]->class_label) continue;
            if (adjacency_test(*clouds[i], *clouds[j], clouds)) uf.unite(i, j);
        }
    }
    std::map<std::size_t, std::vector<std::int64_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[uf.find(i)].push_back(clouds[i]->id);

    std::vector<MegaCloud> out;
    out.reserve(groups.size());
    for (auto& [root, ids] : groups) {
        std::sort(ids.begin(), ids.end());
        MegaCloud mg;
        mg.class_label = clouds[root]->class_label;
        mg.member_cloud_ids = std::move(ids);
        out.push_back(std::move(mg));
    }
    std::sort(out.begin(), out.end(), [](const MegaCloud& a, const MegaCloud& b) {
        return a.member_cloud_ids.front() < b.member_cloud_ids.front();
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<std::int64_t>(i);
    return out;
}

}  // namespace dmr
