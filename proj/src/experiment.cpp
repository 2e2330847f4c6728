#include "karnet/experiment.hpp"

#include "karnet/errors.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace karnet {

namespace {

std::size_t parse_count(const std::string& text, const std::string& context) {
    std::size_t v = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, v);
    if (text.empty() || res.ec != std::errc() || res.ptr != end)
        throw ConfigError(context + ": '" + text + "' is not a non-negative integer");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, sep)) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                   item.end());
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

NetworkSpec make_spec(const Matrix& x, const Matrix& y, const ExperimentConfig& cfg,
                      const std::vector<std::size_t>& hidden, std::uint64_t seed) {
    NetworkSpec spec;
    spec.input_dim = static_cast<std::size_t>(x.cols());
    spec.output_dim = static_cast<std::size_t>(y.cols());
    spec.hidden = hidden;
    spec.activation = cfg.activation;
    spec.seed = seed;
    spec.init = cfg.init;
    return spec;
}

struct FoldSplit {
    Dataset train;
    Dataset test;
};

// Scaling is fitted on the training rows only and reused on the test rows.
FoldSplit split_and_scale(const Dataset& ds, const std::vector<std::size_t>& train_idx,
                          const std::vector<std::size_t>& test_idx, double epsilon) {
    FoldSplit s;
    s.train = scale_minmax(subset(ds, train_idx), epsilon);
    s.test = apply_scaling(subset(ds, test_idx), *s.train.scaling);
    return s;
}

double test_accuracy(const Network& net, const Dataset& test) {
    const Matrix g = net.forward(test.x);
    const std::size_t errors = classification_errors(g, test.y);
    return 1.0 - static_cast<double>(errors) / static_cast<double>(test.rows());
}

std::vector<std::size_t> select_hidden(const Dataset& train, const ExperimentConfig& cfg,
                                       std::uint64_t seed) {
    std::vector<std::size_t> grid = cfg.grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const FoldPlan inner = stratified_folds(train.labels, cfg.inner_folds, seed);
    std::size_t best_h = grid.front();
    double best_acc = -1.0;
    for (std::size_t h : grid) {
        const auto hidden = hidden_layers_for(cfg.arch, h);
        std::vector<double> accs;
        for (std::size_t f = 0; f < inner.k; ++f) {
            const FoldSplit s = split_and_scale(train, inner.train_indices(f), inner.test_indices(f),
                                                cfg.scale_epsilon);
            const TrainResult r = train_model(s.train.x, s.train.y, cfg, hidden, derive_seed(seed, h, f));
            accs.push_back(test_accuracy(r.network, s.test));
        }
        const double acc = mean(accs);
        if (acc > best_acc) {
            best_acc = acc;
            best_h = h;
        }
    }
    return hidden_layers_for(cfg.arch, best_h);
}

} // namespace

std::string to_string(TrainerKind t) {
    return t == TrainerKind::kar ? "kar" : "gd";
}

TrainerKind trainer_kind_from_string(const std::string& s) {
    if (s == "kar")
        return TrainerKind::kar;
    if (s == "gd")
        return TrainerKind::gd;
    throw ConfigError("unknown trainer '" + s + "' (expected kar|gd)");
}

std::string to_string(ArchPattern a) {
    return a == ArchPattern::two_layer ? "two-layer" : "exp";
}

ArchPattern arch_pattern_from_string(const std::string& s) {
    if (s == "two-layer" || s == "2layer")
        return ArchPattern::two_layer;
    if (s == "exp" || s == "exponential")
        return ArchPattern::exponential;
    throw ConfigError("unknown architecture pattern '" + s + "' (expected two-layer|exp)");
}

std::vector<std::size_t> hidden_layers_for(ArchPattern pattern, std::size_t h) {
    if (h == 0)
        throw ConfigError("hidden size must be >= 1");
    if (pattern == ArchPattern::two_layer)
        return {h};
    return {4 * h, 2 * h, h};
}

std::vector<std::size_t> parse_layers(const std::string& text) {
    if (text.rfind("exp:", 0) == 0)
        return hidden_layers_for(ArchPattern::exponential, parse_count(text.substr(4), "--layers"));
    std::vector<std::size_t> out;
    for (const auto& item : split(text, ','))
        out.push_back(parse_count(item, "--layers"));
    for (std::size_t h : out)
        if (h == 0)
            throw ConfigError("--layers: hidden sizes must be >= 1");
    return out;
}

std::vector<std::size_t> parse_counts(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : split(text, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(parse_count(item, "--grid"));
            continue;
        }
        const std::size_t lo = parse_count(item.substr(0, dash), "--grid");
        const std::size_t hi = parse_count(item.substr(dash + 1), "--grid");
        if (hi < lo)
            throw ConfigError("--grid: empty range '" + item + "'");
        for (std::size_t v = lo; v <= hi; ++v)
            out.push_back(v);
    }
    return out;
}

const std::vector<std::size_t>& default_hidden_grid() {
    static const std::vector<std::size_t> grid = {1, 2, 3, 5, 10, 20, 30, 50, 80, 100, 200, 500};
    return grid;
}

void ExperimentConfig::validate() const {
    if (trials < 1)
        throw ConfigError("trials must be >= 1");
    if (folds < 2 || inner_folds < 2)
        throw ConfigError("folds must be >= 2");
    if (!(scale_epsilon > 0.0 && scale_epsilon < 0.5))
        throw ConfigError("scaling epsilon must lie in (0, 0.5)");
    for (std::size_t h : grid)
        if (h == 0)
            throw ConfigError("grid values must be >= 1");
    if (!(learning_rate >= 0.0))
        throw ConfigError("learning rate must be non-negative");
    (void)ActivationPair::by_name(activation);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Dataset load_dataset(const ExperimentConfig& cfg) {
    if (cfg.data == "iris" || cfg.data == "builtin:iris")
        return iris_dataset();
    if (cfg.data == "xor" || cfg.data == "builtin:xor")
        return make_xor(true);
    return load_csv(cfg.data, cfg.label_col, cfg.header);
}

TrainResult train_model(const Matrix& x, const Matrix& y, const ExperimentConfig& cfg,
                        const std::vector<std::size_t>& hidden, std::uint64_t seed) {
    const NetworkSpec spec = make_spec(x, y, cfg, hidden, seed);
    if (cfg.trainer == TrainerKind::kar) {
        KarConfig kc;
        kc.spec = spec;
        kc.rcond = cfg.rcond;
        kc.hidden = cfg.hidden;
        return train_kar(x, y, kc);
    }
    GdConfig gc;
    gc.spec = spec;
    gc.learning_rate = cfg.learning_rate;
    gc.max_iters = cfg.gd_iters;
    gc.gradient_clip = cfg.gd_clip;
    GdResult r = train_gd(x, y, gc);
    return {std::move(r.network), std::move(r.report)};
}

// ---------------------------------------------------------------------------
// cross-validation

void EvalReport::aggregate() {
    std::vector<double> acc, err, test_sse, train_sse, times;
    for (const FoldResult& f : folds) {
        acc.push_back(f.accuracy);
        err.push_back(f.error_rate);
        test_sse.push_back(f.test_sse);
        train_sse.push_back(f.train_sse);
        times.push_back(f.train_time_s);
    }
    mean_accuracy = mean(acc);
    mean_error_rate = mean(err);
    mean_test_sse = mean(test_sse);
    mean_train_sse = mean(train_sse);
    mean_train_time_s = mean(times);
    total_train_time_s = 0.0;
    for (double t : times)
        total_train_time_s += t;
}

nlohmann::json to_json(const EvalReport& r, bool include_timing) {
    nlohmann::json folds = nlohmann::json::array();
    for (const FoldResult& f : r.folds) {
        nlohmann::json j = {
            {"trial", f.trial},       {"fold", f.fold},           {"seed", f.seed},
            {"hidden", f.hidden},     {"test_count", f.test_count}, {"accuracy", f.accuracy},
            {"error_rate", f.error_rate}, {"test_sse", f.test_sse}, {"train_sse", f.train_sse},
        };
        if (include_timing)
            j["train_time_s"] = f.train_time_s;
        folds.push_back(std::move(j));
    }
    nlohmann::json agg = {
        {"mean_accuracy", r.mean_accuracy},
        {"mean_error_rate", r.mean_error_rate},
        {"mean_test_sse", r.mean_test_sse},
        {"mean_train_sse", r.mean_train_sse},
    };
    if (include_timing) {
        agg["total_train_time_s"] = r.total_train_time_s;
        agg["mean_train_time_s"] = r.mean_train_time_s;
    }
    return {
        {"command", r.command},
        {"trainer", r.trainer},
        {"dataset", r.dataset},
        {"trial_seeds", r.trial_seeds},
        {"fold_assignments", r.fold_assignments},
        {"folds", std::move(folds)},
        {"aggregate", std::move(agg)},
    };
}

nlohmann::json strip_timing(nlohmann::json j) {
    if (j.is_object()) {
        nlohmann::json out = nlohmann::json::object();
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& key = it.key();
            if (key.size() >= 7 && key.compare(key.size() - 7, 7, "_time_s") == 0)
                continue;
            out[key] = strip_timing(it.value());
        }
        return out;
    }
    if (j.is_array()) {
        for (auto& item : j)
            item = strip_timing(item);
    }
    return j;
}

EvalReport run_cv(const ExperimentConfig& cfg) {
    return run_cv(load_dataset(cfg), cfg);
}

EvalReport run_cv(const Dataset& ds, const ExperimentConfig& cfg) {
    cfg.validate();
    if (ds.labels.empty())
        throw ConfigError("cv: dataset has no class labels");
    if (cfg.grid.empty() && cfg.layers.empty())
        throw ConfigError("cv: give either fixed layers or a hidden-size grid");

    EvalReport report;
    report.command = "cv";
    report.trainer = to_string(cfg.trainer);
    report.dataset = cfg.data;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t trial_seed = derive_seed(cfg.seed, t);
        report.trial_seeds.push_back(trial_seed);
        const FoldPlan plan = stratified_folds(ds.labels, cfg.folds, trial_seed);
        report.fold_assignments.push_back(plan.assignment);

        for (std::size_t f = 0; f < plan.k; ++f) {
            const FoldSplit s = split_and_scale(ds, plan.train_indices(f), plan.test_indices(f),
                                                cfg.scale_epsilon);
            const std::uint64_t fold_seed = derive_seed(trial_seed, f + 1);
            const std::vector<std::size_t> hidden =
                cfg.grid.empty() ? cfg.layers : select_hidden(s.train, cfg, derive_seed(fold_seed, 0));

            const TrainResult r = train_model(s.train.x, s.train.y, cfg, hidden, fold_seed);
            const Matrix g = r.network.forward(s.test.x);
            const std::size_t errors = classification_errors(g, s.test.y);

            FoldResult fr;
            fr.trial = t;
            fr.fold = f;
            fr.seed = fold_seed;
            fr.hidden = hidden;
            fr.test_count = s.test.rows();
            fr.error_rate = static_cast<double>(errors) / static_cast<double>(s.test.rows());
            fr.accuracy = 1.0 - fr.error_rate;
            fr.test_sse = sse(g, s.test.y);
            fr.train_sse = r.report.train_sse;
            fr.train_time_s = r.report.wall_time_s;
            report.folds.push_back(std::move(fr));
        }
    }
    report.aggregate();
    return report;
}

double majority_accuracy(const Dataset& train, const Dataset& test) {
    std::vector<std::size_t> counts(std::max(train.class_count(), std::size_t{1}), 0);
    for (std::size_t l : train.labels)
        ++counts.at(l);
    const auto majority = static_cast<std::size_t>(
        std::distance(counts.begin(), std::max_element(counts.begin(), counts.end())));
    return accuracy(std::vector<std::size_t>(test.labels.size(), majority), test.labels);
}

// ---------------------------------------------------------------------------
// XOR demo

XorDemoResult run_xor_demo(const ExperimentConfig& cfg) {
    const Dataset ds = make_xor(true);
    auto train = [&](std::vector<std::size_t> hidden) {
        KarConfig kc;
        kc.spec = make_spec(ds.x, ds.y, cfg, hidden, cfg.seed);
        kc.rcond = cfg.rcond;
        kc.hidden = cfg.hidden;
        return train_kar(ds.x, ds.y, kc);
    };
    TrainResult two = train({2});
    TrainResult five = train({3, 3, 3, 3});
    XorDemoResult r{two.network.forward(ds.x),
                    five.network.forward(ds.x),
                    std::move(two.report),
                    std::move(five.report),
                    std::move(two.network),
                    std::move(five.network)};
    return r;
}

void write_surface_csv(const XorDemoResult& r, std::ostream& out, std::size_t steps) {
    if (steps < 2)
        throw ConfigError("surface grid needs at least 2 steps per axis");
    const auto n = static_cast<Eigen::Index>(steps * steps);
    Matrix grid(n, 2);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < steps; ++i)
        for (std::size_t j = 0; j < steps; ++j, ++row) {
            grid(row, 0) = static_cast<double>(i) / static_cast<double>(steps - 1);
            grid(row, 1) = static_cast<double>(j) / static_cast<double>(steps - 1);
        }
    const Matrix two = r.two_layer_net.forward(grid);
    const Matrix five = r.five_layer_net.forward(grid);

    const auto old_precision = out.precision(17);
    out << "x1,x2,two_layer,five_layer\n";
    for (Eigen::Index i = 0; i < n; ++i)
        out << grid(i, 0) << ',' << grid(i, 1) << ',' << two(i, 0) << ',' << five(i, 0) << '\n';
    out.precision(old_precision);
}

nlohmann::json to_json(const XorDemoResult& r, bool include_timing) {
    auto column = [](const Matrix& m) {
        std::vector<double> v(m.data(), m.data() + m.size());
        return v;
    };
    return {
        {"command", "xor-demo"},
        {"two_layer", {{"outputs", column(r.two_layer_outputs)}, {"train", to_json(r.two_layer, include_timing)}}},
        {"five_layer", {{"outputs", column(r.five_layer_outputs)}, {"train", to_json(r.five_layer, include_timing)}}},
    };
}

// ---------------------------------------------------------------------------
// hidden-size sweep

SweepReport run_iris_sweep(const ExperimentConfig& cfg) {
    return run_iris_sweep(load_dataset(cfg), cfg);
}

SweepReport run_iris_sweep(const Dataset& ds, const ExperimentConfig& cfg) {
    cfg.validate();
    if (ds.labels.empty())
        throw ConfigError("iris-sweep: dataset has no class labels");
    if (cfg.grid.empty())
        throw ConfigError("iris-sweep: empty hidden-size grid");

    const auto [train_idx, test_idx] = split_first_per_class(ds, cfg.per_class);
    if (train_idx.empty() || test_idx.empty())
        throw ConfigError("iris-sweep: split leaves an empty train or test set");
    const FoldSplit s = split_and_scale(ds, train_idx, test_idx, cfg.scale_epsilon);

    SweepReport report;
    report.train_count = s.train.rows();
    report.test_count = s.test.rows();
    report.hidden_policy = to_string(cfg.hidden);
    report.init = cfg.init.describe();
    for (std::size_t h : cfg.grid) {
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const std::uint64_t seed = derive_seed(cfg.seed, t);
            const TrainResult r = train_model(s.train.x, s.train.y, cfg, {h}, seed);
            const Matrix g_test = r.network.forward(s.test.x);

            SweepRow row;
            row.h = h;
            row.trial = t;
            row.seed = seed;
            row.sse = r.report.train_sse;
            row.transformed_sse = r.report.transformed_sse;
            row.train_error = r.report.train_error_rate;
            row.test_error = static_cast<double>(classification_errors(g_test, s.test.y))
                           / static_cast<double>(s.test.rows());
            row.train_time_s = r.report.wall_time_s;
            report.rows.push_back(row);
        }
    }
    return report;
}

void write_sweep_csv(const SweepReport& r, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "h,trial,seed,sse,transformed_sse,train_err,test_err\n";
    for (const SweepRow& row : r.rows)
        out << row.h << ',' << row.trial << ',' << row.seed << ',' << row.sse << ','
            << row.transformed_sse << ',' << row.train_error << ',' << row.test_error << '\n';
    out.precision(old_precision);
}

nlohmann::json to_json(const SweepReport& r, bool include_timing) {
    nlohmann::json rows = nlohmann::json::array();
    std::map<std::size_t, std::vector<const SweepRow*>> by_h;
    for (const SweepRow& row : r.rows) {
        nlohmann::json j = {
            {"h", row.h},
            {"trial", row.trial},
            {"seed", row.seed},
            {"sse", row.sse},
            {"transformed_sse", row.transformed_sse},
            {"train_error", row.train_error},
            {"test_error", row.test_error},
        };
        if (include_timing)
            j["train_time_s"] = row.train_time_s;
        rows.push_back(std::move(j));
        by_h[row.h].push_back(&row);
    }
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& [h, group] : by_h) {
        std::vector<double> sses, train_err, test_err;
        for (const SweepRow* row : group) {
            sses.push_back(row->sse);
            train_err.push_back(row->train_error);
            test_err.push_back(row->test_error);
        }
        summary.push_back({
            {"h", h},
            {"mean_sse", mean(sses)},
            {"max_sse", *std::max_element(sses.begin(), sses.end())},
            {"mean_train_error", mean(train_err)},
            {"mean_test_error", mean(test_err)},
        });
    }
    return {
        {"command", "iris-sweep"},
        {"train_count", r.train_count},
        {"test_count", r.test_count},
        {"hidden_policy", r.hidden_policy},
        {"init", r.init},
        {"rows", std::move(rows)},
        {"summary", std::move(summary)},
    };
}

// ---------------------------------------------------------------------------
// gradient check

GradientCheckReport run_gradient_check(const ExperimentConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    auto pick = [&rng](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::uniform_real_distribution<double> unit(0.05, 0.95);

    GradientCheckReport report;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        NetworkSpec spec;
        do {
            spec.input_dim = pick(1, 4);
            spec.output_dim = pick(1, 3);
            spec.hidden.assign(pick(1, 2), 0);
            for (auto& h : spec.hidden)
                h = pick(1, 5);
        } while (random_init(spec).parameter_count() > 200);
        spec.activation = cfg.activation;
        spec.init = WeightInit::fan_in();
        spec.seed = derive_seed(cfg.seed, t);

        const auto m = static_cast<Eigen::Index>(pick(1, 8));
        Matrix x(m, static_cast<Eigen::Index>(spec.input_dim));
        Matrix y(m, static_cast<Eigen::Index>(spec.output_dim));
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x.data()[i] = unit(rng);
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y.data()[i] = unit(rng);

        const double err = check_gradient(random_init(spec), x, y);
        report.max_relative_errors.push_back(err);
        report.worst = std::max(report.worst, err);
    }
    return report;
}

nlohmann::json to_json(const GradientCheckReport& r) {
    return {{"command", "gradient-check"}, {"max_relative_errors", r.max_relative_errors}, {"worst", r.worst}};
}

} // namespace karnet
