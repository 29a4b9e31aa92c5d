// Minimal end-to-end tour: train on a tiny inline dataset, balance it, and
// classify a few queries with the cascade.
#include <iostream>

#include "dmr/dmr.hpp"

int main() {
    dmr::Dataset train;
    const auto add = [&](double x, double y, const char* label) {
        train.samples.push_back({x, y});
        train.labels.emplace_back(label);
        train.source_ids.push_back(static_cast<std::int64_t>(train.source_ids.size()));
    };
    add(0.0, 0.0, "left");
    add(0.2, 0.1, "left");
    add(-0.1, 0.2, "left");
    add(0.1, -0.2, "left");
    add(5.0, 5.0, "right");
    add(5.2, 4.9, "right");
    add(4.8, 5.1, "right");

    dmr::TrainOptions opt;
    opt.balance = true;
    opt.seed = 42;
    const dmr::TrainResult trained = dmr::train_model(train, opt);
    const dmr::DmrModel& model = trained.model;

    std::cout << "prototypes: " << model.cloud_count() << ", mega-clouds: "
              << model.megaclouds.size() << ", synthetic samples: "
              << trained.synthetic.size() << "\n";

    for (const dmr::Rule& rule : dmr::export_rules(model)) {
        std::cout << dmr::rule_to_string(rule) << "\n";
    }

    const dmr::FeatureVector queries[] = {{0.1, 0.1}, {5.1, 5.0}, {2.5, 2.5}};
    for (const auto& q : queries) {
        const dmr::FeatureVector x = dmr::standardize_apply(q, model.standardization);
        const dmr::Prediction p = dmr::cascade_predict(x, model);
        std::cout << "(" << q[0] << ", " << q[1] << ") -> \"" << p.label << "\" score "
                  << p.score << (p.fired_pair ? " via pair " + std::to_string(*p.fired_pair + 1)
                                              : std::string(" via fallback"))
                  << "\n";
    }
    return 0;
}
