// karnet: train and evaluate analytically solved feedforward networks.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.

#include "karnet/errors.hpp"
#include "karnet/experiment.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_config = 2;
constexpr int exit_data = 3;
constexpr int exit_numerical = 4;

struct CliOptions {
    karnet::ExperimentConfig cfg;
    std::string layers;
    std::string grid;
    std::string trainer = "kar";
    std::string hidden;
    std::string init;
    std::string arch = "two-layer";
    std::string weights = "weights.json";
    std::string out = ".";
    bool no_header = false;
    double rcond = 0.0;
    double clip = 10.0;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw karnet::ConfigError("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

json scaling_to_json(const karnet::MinMaxScaling& s) {
    return {{"min", s.min}, {"max", s.max}, {"epsilon", s.epsilon}};
}

karnet::MinMaxScaling scaling_from_json(const json& j) {
    karnet::MinMaxScaling s;
    s.min = j.at("min").get<std::vector<double>>();
    s.max = j.at("max").get<std::vector<double>>();
    s.epsilon = j.at("epsilon").get<double>();
    return s;
}

int cmd_train(const karnet::ExperimentConfig& cfg) {
    const karnet::Dataset raw = karnet::load_dataset(cfg);
    if (cfg.layers.empty())
        throw karnet::ConfigError("train: --layers is required");
    const karnet::Dataset ds = karnet::scale_minmax(raw, cfg.scale_epsilon);
    const karnet::TrainResult r = karnet::train_model(ds.x, ds.y, cfg, cfg.layers, cfg.seed);

    write_json(cfg.out / "weights.json", {
                                             {"network", karnet::to_json(r.network)},
                                             {"scaling", scaling_to_json(*ds.scaling)},
                                             {"class_names", ds.class_names},
                                             {"trainer", karnet::to_string(cfg.trainer)},
                                         });
    write_json(cfg.out / "report.json", karnet::to_json(r.report));
    std::cout << "trained " << r.report.trainer << " net: train SSE " << r.report.train_sse
              << ", train error rate " << r.report.train_error_rate << ", " << r.report.wall_time_s
              << " s\n";
    return 0;
}

int cmd_eval(const karnet::ExperimentConfig& cfg, const std::string& weights_path) {
    std::ifstream in(weights_path);
    if (!in)
        throw karnet::DataError(karnet::DataError::Kind::missing_file, weights_path + ": cannot open file");
    json saved;
    try {
        saved = json::parse(in);
    } catch (const json::exception& e) {
        throw karnet::DataError(karnet::DataError::Kind::non_numeric, weights_path + ": " + e.what());
    }
    const karnet::Network net = karnet::network_from_json(saved.at("network"));
    const karnet::Dataset ds = karnet::apply_scaling(karnet::load_dataset(cfg),
                                                     scaling_from_json(saved.at("scaling")));
    const karnet::Matrix g = net.forward(ds.x);
    const std::size_t errors = karnet::classification_errors(g, ds.y);

    karnet::EvalReport report;
    report.command = "eval";
    report.trainer = saved.value("trainer", std::string{});
    report.dataset = cfg.data;
    karnet::FoldResult fr;
    fr.test_count = ds.rows();
    fr.hidden = net.spec().hidden;
    fr.seed = net.spec().seed;
    fr.error_rate = static_cast<double>(errors) / static_cast<double>(ds.rows());
    fr.accuracy = 1.0 - fr.error_rate;
    fr.test_sse = karnet::sse(g, ds.y);
    report.folds.push_back(fr);
    report.aggregate();
    write_json(cfg.out / "report.json", karnet::to_json(report));
    std::cout << "accuracy " << fr.accuracy << ", SSE " << fr.test_sse << " on " << ds.rows() << " rows\n";
    return 0;
}

int cmd_cv(const karnet::ExperimentConfig& cfg) {
    const karnet::EvalReport r = karnet::run_cv(cfg);
    write_json(cfg.out / "report.json", karnet::to_json(r));
    std::cout << r.trainer << ": mean accuracy " << r.mean_accuracy << " over " << r.folds.size()
              << " folds, total train time " << r.total_train_time_s << " s\n";
    return 0;
}

int cmd_xor(const karnet::ExperimentConfig& cfg) {
    const karnet::XorDemoResult r = karnet::run_xor_demo(cfg);
    write_json(cfg.out / "report.json", karnet::to_json(r));
    write_json(cfg.out / "weights.json", {{"two_layer", karnet::to_json(r.two_layer_net)},
                                          {"five_layer", karnet::to_json(r.five_layer_net)}});
    std::ofstream surface(cfg.out / "surface.csv");
    karnet::write_surface_csv(r, surface);
    std::cout << "two-layer outputs:  " << r.two_layer_outputs.transpose() << "\n"
              << "five-layer outputs: " << r.five_layer_outputs.transpose() << "\n";
    return 0;
}

int cmd_sweep(const karnet::ExperimentConfig& cfg) {
    const karnet::SweepReport r = karnet::run_iris_sweep(cfg);
    write_json(cfg.out / "report.json", karnet::to_json(r));
    std::ofstream csv(cfg.out / "sweep.csv");
    karnet::write_sweep_csv(r, csv);
    const json summary = karnet::to_json(r, false).at("summary");
    for (const auto& s : summary)
        std::cout << "h=" << s.at("h") << "  max SSE " << s.at("max_sse").get<double>()
                  << "  train err " << s.at("mean_train_error").get<double>() << "  test err "
                  << s.at("mean_test_error").get<double>() << "\n";
    return 0;
}

int cmd_gradient_check(const karnet::ExperimentConfig& cfg) {
    const karnet::GradientCheckReport r = karnet::run_gradient_check(cfg);
    write_json(cfg.out / "report.json", karnet::to_json(r));
    std::cout << "worst relative gradient error over " << r.max_relative_errors.size()
              << " networks: " << r.worst << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-free training of feedforward networks by pseudoinverse solves"};
    app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions o;
    auto& cfg = o.cfg;
    app.add_option("--data", cfg.data, "CSV path or builtin dataset (iris, xor)");
    app.add_option("--label-col", cfg.label_col, "Label column index; negative counts from the end");
    app.add_flag("--no-header", o.no_header, "CSV has no header row");
    app.add_option("--layers", o.layers, "Hidden sizes, e.g. 90, 3,3,3,3 or exp:10");
    app.add_option("--arch", o.arch, "Grid architecture pattern: two-layer or exp");
    app.add_option("--grid", o.grid, "Hidden-size grid, e.g. 79-93 or 1,2,3,5");
    app.add_option("--trainer", o.trainer, "kar or gd");
    app.add_option("--hidden", o.hidden, "Hidden weights: solve or random");
    app.add_option("--init", o.init, "Weight init: unit (uniform(0,1)) or fan-in");
    app.add_option("--rcond", o.rcond, "Relative singular-value cutoff for pseudoinverses");
    app.add_option("--seed", cfg.seed, "Base random seed");
    app.add_option("--trials", cfg.trials, "Monte-Carlo trials");
    app.add_option("--folds", cfg.folds, "Outer cross-validation folds");
    app.add_option("--inner-folds", cfg.inner_folds, "Inner model-selection folds");
    app.add_option("--per-class", cfg.per_class, "Training samples per class for iris-sweep");
    app.add_option("--epsilon", cfg.scale_epsilon, "Feature scaling margin: features map to [eps, 1-eps]");
    app.add_option("--lr", cfg.learning_rate, "Gradient-descent learning rate");
    app.add_option("--iters", cfg.gd_iters, "Gradient-descent iterations");
    app.add_option("--clip", o.clip, "Gradient-descent gradient-norm clip (0 disables)");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--weights", o.weights, "weights.json to evaluate (eval)");

    auto* train = app.add_subcommand("train", "Train one network and write weights.json/report.json");
    auto* eval = app.add_subcommand("eval", "Evaluate a saved weights.json on a dataset");
    auto* cv = app.add_subcommand("cv", "Stratified cross-validation with optional inner grid search");
    auto* xor_demo = app.add_subcommand("xor-demo", "Perturbed XOR reproduction and decision surface");
    auto* sweep = app.add_subcommand("iris-sweep", "Hidden-size sweep on the 90/60 iris split");
    auto* grad = app.add_subcommand("gradient-check", "Backprop vs finite-difference gradient check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        const bool is_sweep = sweep->parsed();
        const bool is_grad = grad->parsed();
        cfg.header = !o.no_header;
        cfg.trainer = karnet::trainer_kind_from_string(o.trainer);
        cfg.arch = karnet::arch_pattern_from_string(o.arch);
        if (!o.layers.empty())
            cfg.layers = karnet::parse_layers(o.layers);
        if (!o.grid.empty())
            cfg.grid = karnet::parse_counts(o.grid);
        if (app.count("--rcond"))
            cfg.rcond = o.rcond;
        cfg.gd_clip = o.clip > 0.0 ? std::optional<double>(o.clip) : std::nullopt;

        // The sweep follows the representation setting: fixed random hidden
        // weights drawn so that the hidden pre-activations stay in (0, 1).
        cfg.hidden = karnet::hidden_weights_from_string(o.hidden.empty() ? (is_sweep ? "random" : "solve") : o.hidden);
        const std::string init = o.init.empty() ? (is_sweep ? "fan-in" : "unit") : o.init;
        if (init == "fan-in")
            cfg.init = karnet::WeightInit::fan_in();
        else if (init != "unit")
            throw karnet::ConfigError("unknown --init '" + init + "' (expected unit|fan-in)");

        if (is_sweep) {
            if (!app.count("--trials"))
                cfg.trials = 10;
            if (cfg.grid.empty())
                cfg.grid = karnet::parse_counts("79-93");
        }
        if (is_grad && !app.count("--trials"))
            cfg.trials = 20;
        if (cv->parsed() && cfg.grid.empty() && cfg.layers.empty())
            cfg.grid = karnet::default_hidden_grid();

        cfg.out = o.out;
        cfg.validate();
        fs::create_directories(cfg.out);

        if (train->parsed())
            return cmd_train(cfg);
        if (eval->parsed())
            return cmd_eval(cfg, o.weights);
        if (cv->parsed())
            return cmd_cv(cfg);
        if (xor_demo->parsed())
            return cmd_xor(cfg);
        if (is_sweep)
            return cmd_sweep(cfg);
        return cmd_gradient_check(cfg);
    } catch (const karnet::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const karnet::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const karnet::Error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    }
}
