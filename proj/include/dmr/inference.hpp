#pragma once

#include <optional>

#include "dmr/density.hpp"

namespace dmr {

/// Outcome of one query: winning label and prototype, the similarity that
/// decided it, and the decision path (index of the ranked pair that fired, or
/// empty for the flat fallback).
struct Prediction {
    std::string label;
    std::int64_t winning_cloud = 0;
    double score = 0.0;
    std::optional<std::size_t> fired_pair;
};

/// Rank every prototype by its training error: the fraction of the training
/// samples it attracts (flat nearest by similarity) that carry a different
/// label. Prototypes attracting nothing get error 0. Order is ascending
/// error, ties broken by descending support then ascending id.
inline RankedPrototypes rank_prototypes(const DmrModel& model,
                                        std::span<const FeatureVector> samples,
                                        std::span<const std::string> labels) {
    if (samples.size() != labels.size()) throw DataError("rank_prototypes: sample/label count mismatch");
    if (samples.empty()) throw DataError("rank_prototypes: empty training set");
    const auto clouds = model.all_clouds();
    if (clouds.empty()) throw ModelError("rank_prototypes: empty model");

    std::map<std::int64_t, std::int64_t> attracted;
    std::map<std::int64_t, std::int64_t> wrong;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const DataCloud* best = clouds.front();
        double best_s = similarity(samples[i], *best);
        for (std::size_t c = 1; c < clouds.size(); ++c) {
            const double s = similarity(samples[i], *clouds[c]);
            if (s > best_s || (s == best_s && clouds[c]->id < best->id)) {
                best = clouds[c];
                best_s = s;
            }
        }
        attracted[best->id] += 1;
        if (best->class_label != labels[i]) wrong[best->id] += 1;
    }

    RankedPrototypes rank;
    for (const DataCloud* cloud : clouds) {
        const auto it = attracted.find(cloud->id);
        rank.per_cloud_error[cloud->id] =
            it == attracted.end() ? 0.0
                                  : static_cast<double>(wrong[cloud->id]) / static_cast<double>(it->second);
        rank.order.push_back(cloud->id);
    }
    std::sort(rank.order.begin(), rank.order.end(), [&](std::int64_t a, std::int64_t b) {
        const double ea = rank.per_cloud_error.at(a);
        const double eb = rank.per_cloud_error.at(b);
        if (ea != eb) return ea < eb;
        const std::int64_t sa = model.find_cloud(a)->support;
        const std::int64_t sb = model.find_cloud(b)->support;
        if (sa != sb) return sa > sb;
        return a < b;
    });
    return rank;
}

/// Single-stage decision: label of the prototype with maximum similarity,
/// ties to the lowest cloud id. Path is always the fallback marker.
inline Prediction flat_predict(const FeatureVector& x, const DmrModel& model) {
    const auto clouds = model.all_clouds();
    if (clouds.empty()) throw ModelError("flat_predict: empty model");
    const DataCloud* best = clouds.front();
    double best_s = similarity(x, *best);
    for (std::size_t c = 1; c < clouds.size(); ++c) {
        const double s = similarity(x, *clouds[c]);
        if (s > best_s || (s == best_s && clouds[c]->id < best->id)) {
            best = clouds[c];
            best_s = s;
        }
    }
    Prediction p;
    p.label = best->class_label;
    p.winning_cloud = best->id;
    p.score = best_s;
    p.fired_pair = std::nullopt;
    return p;
}

struct PairwiseWinner {
    std::int64_t cloud_id = 0;
    double score = 0.0;
};

/// Max over the pair's two similarity values. Exact ties go to `a`, the
/// higher-ranked of the two.
inline PairwiseWinner pairwise_max(const FeatureVector& x, const DataCloud& a, const DataCloud& b) {
    const double sa = similarity(x, a);
    const double sb = similarity(x, b);
    if (sb > sa) return {b.id, sb};
    return {a.id, sa};
}

/// Walk the overlapping ranked pairs (1st,2nd), (2nd,3rd), ... top-down. The
/// first pair whose winner reaches the threshold decides; if none does, the
/// flat decision is the answer.
inline Prediction cascade_predict(const FeatureVector& x, const DmrModel& model, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ModelError("cascade_predict: threshold outside [0,1]");
    if (model.cloud_count() == 0) throw ModelError("cascade_predict: empty model");
    if (model.ranking.empty()) throw ModelError("cascade_predict: rank first");

    const auto& order = model.ranking.order;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const DataCloud* a = model.find_cloud(order[i]);
        const DataCloud* b = model.find_cloud(order[i + 1]);
        if (a == nullptr || b == nullptr) throw ModelError("cascade_predict: ranking references unknown cloud");
        const PairwiseWinner w = pairwise_max(x, *a, *b);
        if (w.score >= threshold) {
            Prediction p;
            p.label = model.find_cloud(w.cloud_id)->class_label;
            p.winning_cloud = w.cloud_id;
            p.score = w.score;
            p.fired_pair = i;
            return p;
        }
    }
    return flat_predict(x, model);
}

inline Prediction cascade_predict(const FeatureVector& x, const DmrModel& model) {
    return cascade_predict(x, model, model.threshold);
}

}  // namespace dmr
