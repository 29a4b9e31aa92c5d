#pragma once

#include "dmr/pipeline.hpp"

namespace dmr {

struct EvalConfig {
    std::int64_t repeats = 10;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool balance = false;
    double threshold = kDefaultThreshold;
    std::int64_t balance_cap = 1000;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// One stratified random split. Every class contributes at least one sample
/// to each side, so both partitions always cover all classes.
inline SplitIndices stratified_split(const Dataset& dataset, double train_fraction,
                                     std::mt19937_64& rng) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw DataError("stratified_split: train fraction outside (0,1)");
    }
    std::map<std::string, std::vector<std::size_t>> per_class;
    for (std::size_t i = 0; i < dataset.size(); ++i) per_class[dataset.labels[i]].push_back(i);

    SplitIndices split;
    for (auto& [label, indices] : per_class) {
        if (indices.size() < 2) {
            throw DataError("stratified_split: class \"" + label + "\" has fewer than 2 samples");
        }
        shuffle_in_place(indices, rng);
        const auto n = static_cast<std::int64_t>(indices.size());
        const std::int64_t n_train =
            std::clamp<std::int64_t>(std::llround(train_fraction * static_cast<double>(n)), 1, n - 1);
        for (std::int64_t i = 0; i < n; ++i) {
            (i < n_train ? split.train : split.test).push_back(indices[static_cast<std::size_t>(i)]);
        }
    }
    // Canonical order: the training stream follows the original dataset order.
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

/// The exact split sequence evaluate() consumes, exposed so external oracles
/// can run on identical partitions.
inline std::vector<SplitIndices> evaluation_splits(const Dataset& dataset, const EvalConfig& cfg) {
    if (cfg.repeats < 1) throw DataError("evaluation_splits: repeats must be positive");
    std::vector<SplitIndices> splits;
    splits.reserve(static_cast<std::size_t>(cfg.repeats));
    for (std::int64_t rep = 0; rep < cfg.repeats; ++rep) {
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(rep)));
        splits.push_back(stratified_split(dataset, cfg.train_fraction, rng));
    }
    return splits;
}

/// Exact-match rate.
inline double accuracy(std::span<const std::string> predictions, std::span<const std::string> truth) {
    if (predictions.size() != truth.size()) throw DataError("accuracy: length mismatch");
    if (predictions.empty()) throw DataError("accuracy: empty");
    std::size_t matches = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == truth[i]) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(predictions.size());
}

struct EvalReport {
    double accuracy = 0.0;                            // pooled over all repetitions
    std::map<std::string, double> per_class_accuracy; // pooled recall per class
    std::vector<std::string> confusion_labels;
    std::vector<std::vector<std::int64_t>> confusion; // row: truth, column: prediction
    std::int64_t n_prototypes = 0;                    // rounded mean over repetitions
    std::int64_t n_megaclouds = 0;                    // rounded mean over repetitions
    std::vector<double> fold_accuracies;
};

/// Monte-Carlo cross-validation: `repeats` independent stratified splits at
/// the given ratio; each repetition trains from scratch on its training side
/// only (standardization included, so no test leakage) and cascade-predicts
/// its test side.
inline EvalReport evaluate(const Dataset& dataset, const EvalConfig& cfg = {}) {
    const auto splits = evaluation_splits(dataset, cfg);

    std::map<std::string, std::size_t> label_index;
    for (const auto& label : dataset.labels) label_index.emplace(label, 0);
    EvalReport report;
    for (auto& [label, idx] : label_index) {
        idx = report.confusion_labels.size();
        report.confusion_labels.push_back(label);
    }
    report.confusion.assign(report.confusion_labels.size(),
                            std::vector<std::int64_t>(report.confusion_labels.size(), 0));

    double prototype_sum = 0.0;
    double megacloud_sum = 0.0;
    for (std::size_t rep = 0; rep < splits.size(); ++rep) {
        Dataset train;
        for (std::size_t i : splits[rep].train) {
            train.samples.push_back(dataset.samples[i]);
            train.labels.push_back(dataset.labels[i]);
            train.source_ids.push_back(dataset.source_ids[i]);
        }
        TrainOptions opt;
        opt.balance = cfg.balance;
        opt.balance_cap = cfg.balance_cap;
        opt.threshold = cfg.threshold;
        opt.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
        const TrainResult trained = train_model(train, opt);

        std::size_t fold_matches = 0;
        for (std::size_t i : splits[rep].test) {
            const FeatureVector x =
                standardize_apply(dataset.samples[i], trained.model.standardization);
            const Prediction p = cascade_predict(x, trained.model);
            const std::size_t row = label_index.at(dataset.labels[i]);
            const std::size_t col = label_index.at(p.label);
            report.confusion[row][col] += 1;
            if (p.label == dataset.labels[i]) ++fold_matches;
        }
        report.fold_accuracies.push_back(static_cast<double>(fold_matches) /
                                         static_cast<double>(splits[rep].test.size()));
        prototype_sum += static_cast<double>(trained.model.cloud_count());
        megacloud_sum += static_cast<double>(trained.model.megaclouds.size());
    }

    std::int64_t trace = 0;
    std::int64_t total = 0;
    for (std::size_t r = 0; r < report.confusion.size(); ++r) {
        std::int64_t row_total = 0;
        for (std::size_t c = 0; c < report.confusion[r].size(); ++c) {
            row_total += report.confusion[r][c];
            total += report.confusion[r][c];
        }
        trace += report.confusion[r][r];
        report.per_class_accuracy[report.confusion_labels[r]] =
            row_total == 0 ? 0.0
                           : static_cast<double>(report.confusion[r][r]) / static_cast<double>(row_total);
    }
    report.accuracy = total == 0 ? 0.0 : static_cast<double>(trace) / static_cast<double>(total);
    report.n_prototypes = std::llround(prototype_sum / static_cast<double>(splits.size()));
    report.n_megaclouds = std::llround(megacloud_sum / static_cast<double>(splits.size()));
    return report;
}

}  // namespace dmr
