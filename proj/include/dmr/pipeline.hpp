#pragma once

#include "dmr/balancer.hpp"
#include "dmr/dataset.hpp"
#include "dmr/inference.hpp"
#include "dmr/megaclouds.hpp"

namespace dmr {

struct TrainOptions {
    bool balance = false;
    std::int64_t balance_cap = 1000;
    double threshold = kDefaultThreshold;
    std::uint64_t seed = 0;
};

struct TrainResult {
    DmrModel model;
    // Per-cloud member samples in standardized space (final within-class
    // Voronoi assignment, which is what "data cloud" means here).
    std::map<std::int64_t, std::vector<FeatureVector>> members;
    std::vector<SyntheticSample> synthetic;
    BalanceReport balance_report;
};

/// Assign every standardized sample to the nearest cloud of its own class.
inline std::map<std::int64_t, std::vector<FeatureVector>> collect_members(
    const DmrModel& model, std::span<const FeatureVector> standardized,
    std::span<const std::string> labels) {
    if (standardized.size() != labels.size()) {
        throw DataError("collect_members: sample/label count mismatch");
    }
    std::map<std::int64_t, std::vector<FeatureVector>> members;
    for (std::size_t i = 0; i < standardized.size(); ++i) {
        const ClassModel* cm = nullptr;
        for (const auto& candidate : model.classes) {
            if (candidate.class_label == labels[i]) {
                cm = &candidate;
                break;
            }
        }
        if (cm == nullptr) throw DataError("collect_members: unknown class \"" + labels[i] + "\"");
        const std::size_t k = assign_nearest(standardized[i], cm->clouds);
        members[cm->clouds[k].id].push_back(standardized[i]);
    }
    return members;
}

/// Full training pass: standardize, learn each class as a stream, optionally
/// balance cloud counts with synthetic data, merge mega-clouds, and rank the
/// prototypes on the (real) training samples.
inline TrainResult train_model(const Dataset& dataset, const TrainOptions& opt = {}) {
    if (dataset.samples.empty()) throw DataError("train_model: empty dataset");
    if (!(opt.threshold >= 0.0 && opt.threshold <= 1.0)) {
        throw DataError("train_model: threshold outside [0,1]");
    }

    TrainResult result;
    DmrModel& model = result.model;
    model.dimensionality = dataset.dimension();
    model.threshold = opt.threshold;
    model.standardization = standardize_fit(dataset.samples);

    std::vector<FeatureVector> standardized;
    standardized.reserve(dataset.samples.size());
    for (const auto& x : dataset.samples) {
        standardized.push_back(standardize_apply(x, model.standardization));
    }

    std::map<std::string, std::vector<FeatureVector>> class_samples;
    std::map<std::string, std::vector<std::int64_t>> class_source_ids;
    for (std::size_t i = 0; i < standardized.size(); ++i) {
        class_samples[dataset.labels[i]].push_back(standardized[i]);
        class_source_ids[dataset.labels[i]].push_back(dataset.source_ids[i]);
    }

    std::int64_t id_offset = 0;
    for (const auto& [label, samples] : class_samples) {
        ClassModel cm = learn_class(samples, label, class_source_ids.at(label));
        for (auto& cloud : cm.clouds) cloud.id += id_offset;
        id_offset += static_cast<std::int64_t>(cm.clouds.size());
        model.classes.push_back(std::move(cm));
    }

    result.members = collect_members(model, standardized, dataset.labels);

    if (opt.balance) {
        BalanceResult balanced =
            balance_classes(model, result.members, {opt.balance_cap, opt.seed});
        result.synthetic = std::move(balanced.synthetic);
        result.balance_report = std::move(balanced.report);
    }

    model.megaclouds = merge_megaclouds(model);
    model.ranking = rank_prototypes(model, standardized, dataset.labels);
    model.provenance.seed = opt.seed;
    model.provenance.balance = opt.balance;
    model.provenance.balance_cap = opt.balance_cap;
    return result;
}

struct AugmentResult {
    std::vector<SyntheticSample> synthetic;
    BalanceReport report;
};

/// Balance an already trained model in place, reconstructing cloud membership
/// from the original training data. Mega-clouds and ranking are recomputed
/// afterwards since balancing changes the cloud set.
inline AugmentResult augment_model(DmrModel& model, const Dataset& dataset,
                                   const BalanceOptions& opt) {
    if (dataset.samples.empty()) throw DataError("augment_model: empty dataset");
    if (dataset.dimension() != model.dimensionality) {
        throw DataError("augment_model: dataset dimensionality " +
                        std::to_string(dataset.dimension()) + " does not match model " +
                        std::to_string(model.dimensionality));
    }

    std::vector<FeatureVector> standardized;
    standardized.reserve(dataset.samples.size());
    for (const auto& x : dataset.samples) {
        standardized.push_back(standardize_apply(x, model.standardization));
    }

    auto members = collect_members(model, standardized, dataset.labels);
    BalanceResult balanced = balance_classes(model, members, opt);
    model.megaclouds = merge_megaclouds(model);
    model.ranking = rank_prototypes(model, standardized, dataset.labels);
    model.provenance.seed = opt.seed;
    model.provenance.balance = true;
    model.provenance.balance_cap = opt.cap_multiplier;
    return {std::move(balanced.synthetic), std::move(balanced.report)};
}

}  // namespace dmr
