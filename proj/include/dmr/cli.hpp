#pragma once

#include <cstdlib>
#include <ostream>

#include "CLI11.hpp"

#include "dmr/evaluate.hpp"
#include "dmr/model_io.hpp"
#include "dmr/rules.hpp"

namespace dmr {

namespace detail {

/// Seed resolution order: --seed flag, DMR_SEED environment variable, fallback.
inline std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t parsed,
                                  std::uint64_t fallback = 0) {
    if (opt->count() > 0) return parsed;
    const char* env = std::getenv("DMR_SEED");
    if (env == nullptr) return fallback;
    const std::string_view s(env);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("DMR_SEED: not an unsigned integer: \"" + std::string(s) + "\"");
    }
    return value;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

inline std::string path_to_string(const Prediction& p) {
    return p.fired_pair.has_value() ? "pair=" + std::to_string(*p.fired_pair + 1)
                                    : std::string("flat");
}

inline std::string report_to_json(const EvalReport& r) {
    std::string out = "{\n";
    out += "  \"accuracy\": " + fmt_double(r.accuracy) + ",\n";
    out += "  \"per_class_accuracy\": {";
    {
        std::size_t i = 0;
        for (const auto& [label, value] : r.per_class_accuracy) {
            if (i++ > 0) out += ", ";
            out += "\"" + escape_json(label) + "\": " + fmt_double(value);
        }
    }
    out += "},\n";
    out += "  \"confusion_labels\": [";
    for (std::size_t i = 0; i < r.confusion_labels.size(); ++i) {
        if (i > 0) out += ", ";
        out += "\"" + escape_json(r.confusion_labels[i]) + "\"";
    }
    out += "],\n";
    out += "  \"confusion\": [";
    for (std::size_t i = 0; i < r.confusion.size(); ++i) {
        if (i > 0) out += ", ";
        out += fmt_id_list(r.confusion[i]);
    }
    out += "],\n";
    out += "  \"n_prototypes\": " + std::to_string(r.n_prototypes) + ",\n";
    out += "  \"n_megaclouds\": " + std::to_string(r.n_megaclouds) + ",\n";
    out += "  \"fold_accuracies\": [";
    for (std::size_t i = 0; i < r.fold_accuracies.size(); ++i) {
        if (i > 0) out += ", ";
        out += fmt_double(r.fold_accuracies[i]);
    }
    out += "]\n}\n";
    return out;
}

inline void print_report(const EvalReport& r, std::ostream& out) {
    out << "accuracy: " << fmt_double(r.accuracy) << "\n";
    out << "per-class accuracy:\n";
    for (const auto& [label, value] : r.per_class_accuracy) {
        out << "  \"" << label << "\": " << fmt_double(value) << "\n";
    }
    out << "fold accuracies:";
    for (double a : r.fold_accuracies) out << " " << fmt_double(a);
    out << "\n";
    out << "mean prototypes: " << r.n_prototypes << "\n";
    out << "mean mega-clouds: " << r.n_megaclouds << "\n";
    out << "confusion (rows: truth, columns: prediction):\n";
    for (std::size_t i = 0; i < r.confusion.size(); ++i) {
        out << "  \"" << r.confusion_labels[i] << "\":";
        for (std::int64_t n : r.confusion[i]) out << " " << n;
        out << "\n";
    }
}

}  // namespace detail

/// Full command-line surface. Returns the process exit code: 0 success,
/// 1 usage error, 2 data error, 3 model error.
inline int cli_dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"prototype-based classifier over CSV feature vectors", "dmr"};
    app.require_subcommand(1);

    struct {
        std::string data, model;
        bool balance = false;
        double thr = kDefaultThreshold;
        std::uint64_t seed = 0;
        std::int64_t cap = 1000;
    } t;
    auto* train = app.add_subcommand("train", "train a model from a labeled CSV");
    train->add_option("--data", t.data, "labeled training CSV")->required();
    train->add_option("--model", t.model, "output model file")->required();
    train->add_flag("--balance", t.balance, "equalize per-class prototype counts with synthetic data");
    train->add_option("--thr", t.thr, "confidence threshold for the cascade")
        ->check(CLI::Range(0.0, 1.0));
    auto* train_seed = train->add_option("--seed", t.seed, "random seed (default: DMR_SEED or 0)");
    train->add_option("--balance-cap", t.cap, "synthetic sample budget per unit of deficit")
        ->check(CLI::PositiveNumber);
    train->callback([&] {
        const Dataset ds = load_csv(t.data);
        TrainOptions opt;
        opt.balance = t.balance;
        opt.threshold = t.thr;
        opt.balance_cap = t.cap;
        opt.seed = detail::resolve_seed(train_seed, t.seed);
        const TrainResult r = train_model(ds, opt);
        save_model(r.model, t.model);
        out << "trained on " << ds.size() << " samples: " << r.model.classes.size()
            << " classes, " << r.model.cloud_count() << " prototypes, "
            << r.model.megaclouds.size() << " mega-clouds\n";
        for (const auto& cm : r.model.classes) {
            out << "  class \"" << cm.class_label << "\": " << cm.clouds.size() << " prototypes\n";
        }
        if (t.balance) out << "balance: " << r.synthetic.size() << " synthetic samples\n";
        for (const auto& w : r.balance_report.warnings) err << "warning: " << w << "\n";
        out << "wrote " << t.model << "\n";
    });

    struct {
        std::string model, data, out_path;
        std::uint64_t seed = 0;
        std::int64_t cap = 1000;
    } a;
    auto* augment = app.add_subcommand("augment", "balance an existing model with synthetic data");
    augment->add_option("--model", a.model, "trained model file")->required();
    augment->add_option("--data", a.data, "the model's training CSV")->required();
    augment->add_option("--out", a.out_path, "output model file (default: overwrite --model)");
    auto* augment_seed = augment->add_option("--seed", a.seed, "random seed (default: DMR_SEED or the model's seed)");
    augment->add_option("--balance-cap", a.cap, "synthetic sample budget per unit of deficit")
        ->check(CLI::PositiveNumber);
    augment->callback([&] {
        DmrModel model = load_model(a.model);
        const Dataset ds = load_csv(a.data);
        BalanceOptions opt;
        opt.cap_multiplier = a.cap;
        opt.seed = detail::resolve_seed(augment_seed, a.seed, model.provenance.seed);
        const AugmentResult r = augment_model(model, ds, opt);
        const std::string target = a.out_path.empty() ? a.model : a.out_path;
        save_model(model, target);
        out << "balanced: " << r.synthetic.size() << " synthetic samples, "
            << model.cloud_count() << " prototypes, " << model.megaclouds.size()
            << " mega-clouds\n";
        for (const auto& w : r.report.warnings) err << "warning: " << w << "\n";
        out << "wrote " << target << "\n";
    });

    struct {
        std::string model;
    } g;
    auto* megaclouds = app.add_subcommand("megaclouds", "print a model's mega-cloud partition");
    megaclouds->add_option("--model", g.model, "trained model file")->required();
    megaclouds->callback([&] {
        const DmrModel model = load_model(g.model);
        out << model.megaclouds.size() << " mega-clouds over " << model.cloud_count()
            << " prototypes\n";
        for (const auto& mc : model.megaclouds) {
            out << "mega-cloud " << mc.id << " (\"" << mc.class_label << "\"): prototypes";
            for (std::int64_t id : mc.member_cloud_ids) out << " " << id;
            out << "\n";
        }
    });

    struct {
        std::string model;
    } rk;
    auto* rank = app.add_subcommand("rank", "print a model's prototype ranking");
    rank->add_option("--model", rk.model, "trained model file")->required();
    rank->callback([&] {
        const DmrModel model = load_model(rk.model);
        out << "rank,prototype,class,support,error\n";
        for (std::size_t i = 0; i < model.ranking.order.size(); ++i) {
            const DataCloud* cloud = model.find_cloud(model.ranking.order[i]);
            out << i + 1 << "," << cloud->id << "," << detail::csv_field(cloud->class_label) << ","
                << cloud->support << ","
                << detail::fmt_double(model.ranking.per_cloud_error.at(cloud->id)) << "\n";
        }
    });

    struct {
        std::string model, data;
        double thr = -1.0;
        bool flat = false;
    } p;
    auto* predict = app.add_subcommand("predict", "classify query rows");
    predict->add_option("--model", p.model, "trained model file")->required();
    predict->add_option("--data", p.data, "query CSV (features only, or features plus label)")->required();
    predict->add_option("--thr", p.thr, "override the model's confidence threshold")
        ->check(CLI::Range(0.0, 1.0));
    predict->add_flag("--flat", p.flat, "skip the cascade and use the flat nearest-prototype decision");
    predict->callback([&] {
        const DmrModel model = load_model(p.model);
        const Dataset ds = load_query_csv(p.data, model.dimensionality);
        const double thr = p.thr < 0.0 ? model.threshold : p.thr;
        out << "row,label,score,path\n";
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const FeatureVector x = standardize_apply(ds.samples[i], model.standardization);
            const Prediction pred = p.flat ? flat_predict(x, model) : cascade_predict(x, model, thr);
            out << i << "," << detail::csv_field(pred.label) << ","
                << detail::fmt_double(pred.score) << "," << detail::path_to_string(pred) << "\n";
        }
    });

    struct {
        std::string model, data;
        double thr = -1.0;
    } e;
    auto* explain = app.add_subcommand("explain", "show the decision behind each query row");
    explain->add_option("--model", e.model, "trained model file")->required();
    explain->add_option("--data", e.data, "query CSV (features only, or features plus label)")->required();
    explain->add_option("--thr", e.thr, "override the model's confidence threshold")
        ->check(CLI::Range(0.0, 1.0));
    explain->callback([&] {
        const DmrModel model = load_model(e.model);
        const Dataset ds = load_query_csv(e.data, model.dimensionality);
        const std::vector<Rule> rules = export_rules(model);
        std::map<std::int64_t, std::size_t> rule_of_cloud;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            for (const auto& antecedent : rules[r].antecedents) {
                rule_of_cloud[antecedent.cloud_id] = r;
            }
        }
        const double thr = e.thr < 0.0 ? model.threshold : e.thr;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const FeatureVector x = standardize_apply(ds.samples[i], model.standardization);
            const Prediction pred = cascade_predict(x, model, thr);
            out << "row " << i << ": label \"" << pred.label << "\" (prototype "
                << pred.winning_cloud << ", similarity " << detail::fmt_double(pred.score)
                << ", path " << detail::path_to_string(pred) << ")\n";
            const Rule& rule = rules[rule_of_cloud.at(pred.winning_cloud)];
            out << "  rule " << rule.mega_cloud_id << ": " << rule_to_string(rule) << "\n";
        }
    });

    struct {
        std::string model;
    } ru;
    auto* rules_cmd = app.add_subcommand("rules", "export the model as IF-THEN rules");
    rules_cmd->add_option("--model", ru.model, "trained model file")->required();
    rules_cmd->callback([&] {
        const DmrModel model = load_model(ru.model);
        for (const Rule& rule : export_rules(model)) {
            out << "rule " << rule.mega_cloud_id << ": " << rule_to_string(rule) << "\n";
        }
    });

    struct {
        std::string data, out_path;
        std::int64_t repeats = 10;
        double split = 0.8;
        std::uint64_t seed = 0;
        bool balance = false;
        double thr = kDefaultThreshold;
        std::int64_t cap = 1000;
    } ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "repeated stratified split evaluation");
    evaluate_cmd->add_option("--data", ev.data, "labeled CSV")->required();
    evaluate_cmd->add_option("--repeats", ev.repeats, "number of random splits")
        ->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--split", ev.split, "training fraction")
        ->check([](const std::string& s) -> std::string {
            try {
                const double v = std::stod(s);
                if (v > 0.0 && v < 1.0) return {};
            } catch (...) {
            }
            return "training fraction must be strictly between 0 and 1";
        });
    auto* eval_seed = evaluate_cmd->add_option("--seed", ev.seed, "random seed (default: DMR_SEED or 0)");
    evaluate_cmd->add_flag("--balance", ev.balance, "balance each repetition's training side");
    evaluate_cmd->add_option("--thr", ev.thr, "confidence threshold for the cascade")
        ->check(CLI::Range(0.0, 1.0));
    evaluate_cmd->add_option("--balance-cap", ev.cap, "synthetic sample budget per unit of deficit")
        ->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--out", ev.out_path, "also write the report as JSON");
    evaluate_cmd->callback([&] {
        const Dataset ds = load_csv(ev.data);
        EvalConfig cfg;
        cfg.repeats = ev.repeats;
        cfg.train_fraction = ev.split;
        cfg.seed = detail::resolve_seed(eval_seed, ev.seed);
        cfg.balance = ev.balance;
        cfg.threshold = ev.thr;
        cfg.balance_cap = ev.cap;
        const EvalReport report = evaluate(ds, cfg);
        detail::print_report(report, out);
        if (!ev.out_path.empty()) {
            std::ofstream json_out(ev.out_path, std::ios::binary | std::ios::trunc);
            if (!json_out) throw DataError("cannot write report file: " + ev.out_path);
            json_out << detail::report_to_json(report);
        }
    });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& parse_error) {
        const int code = app.exit(parse_error, out, err);
        return code == 0 ? 0 : 1;
    } catch (const DataError& data_error) {
        err << "error: " << data_error.what() << "\n";
        return 2;
    } catch (const ModelError& model_error) {
        err << "error: " << model_error.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace dmr
