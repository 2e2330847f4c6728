#include "karnet/kar_trainer.hpp"

#include "karnet/errors.hpp"
#include "karnet/metrics.hpp"

#include <chrono>

namespace karnet {

namespace {

void check_shapes(const Matrix& x, const Matrix& y, const NetworkSpec& spec) {
    if (x.rows() != y.rows())
        throw DimensionError("kar: X has " + std::to_string(x.rows()) + " rows but Y has "
                             + std::to_string(y.rows()));
    if (x.cols() != static_cast<Eigen::Index>(spec.input_dim))
        throw DimensionError("kar: X is " + shape_of(x) + " but the spec expects "
                             + std::to_string(spec.input_dim) + " features");
    if (y.cols() != static_cast<Eigen::Index>(spec.output_dim))
        throw DimensionError("kar: Y is " + shape_of(y) + " but the spec expects "
                             + std::to_string(spec.output_dim) + " outputs");
    require_finite(x, "kar input X");
    require_finite(y, "kar target Y");
}

void check_finite(const Matrix& m, std::size_t layer, const char* what) {
    if (!m.allFinite())
        throw NumericalError("kar: non-finite " + std::string(what) + " at layer "
                                 + std::to_string(layer),
                             static_cast<long>(layer));
}

// pinv with the rank-zero guard; `layer` is 1-based.
Matrix layer_pinv(const Matrix& a, std::size_t layer, const std::optional<double>& rcond) {
    PinvResult p = pinv(a, rcond);
    if (p.rank == 0)
        throw RankDeficiencyError("kar: every singular value of the " + shape_of(a)
                                      + " matrix at layer " + std::to_string(layer)
                                      + " is below the cutoff",
                                  static_cast<long>(layer));
    return std::move(p.pinv);
}

void count(SolveStats* stats, std::size_t SolveStats::*field) {
    if (stats)
        ++(stats->*field);
}

// phi([target - 1 * w^T] * pinv(W)) for layer `layer` (1-based) with weights `w`.
Matrix peel(const ActivationPair& act, const Matrix& target, const Matrix& w, std::size_t layer,
            const std::optional<double>& rcond, SolveStats* stats) {
    const Matrix node = w.bottomRows(w.rows() - 1);
    const Matrix node_pinv = layer_pinv(node, layer, rcond);
    count(stats, &SolveStats::peel_inversions);
    Matrix out = act.apply_phi((target.rowwise() - w.row(0)) * node_pinv);
    check_finite(out, layer, "peeled target");
    return out;
}

} // namespace

std::string to_string(HiddenWeights h) {
    return h == HiddenWeights::solve ? "solve" : "random";
}

HiddenWeights hidden_weights_from_string(const std::string& s) {
    if (s == "solve")
        return HiddenWeights::solve;
    if (s == "random" || s == "random_fixed")
        return HiddenWeights::random_fixed;
    throw ConfigError("unknown hidden-weight policy '" + s + "' (expected solve|random)");
}

Network train_single_layer(const Matrix& x, const Matrix& y, const KarConfig& cfg, SolveStats* stats) {
    if (!cfg.spec.hidden.empty())
        throw ConfigError("train_single_layer: spec has hidden layers");
    check_shapes(x, y, cfg.spec);
    const ActivationPair act = ActivationPair::by_name(cfg.spec.activation, cfg.spec.clamp_epsilon);

    Matrix w1 = layer_pinv(with_bias_column(x), 1, cfg.rcond) * act.apply_phi(y);
    count(stats, &SolveStats::layer_solves);
    check_finite(w1, 1, "weights");
    return Network(cfg.spec, {std::move(w1)});
}

Network train_two_layer(const Matrix& x, const Matrix& y, const KarConfig& cfg, SolveStats* stats) {
    if (cfg.spec.hidden.size() != 1)
        throw ConfigError("train_two_layer: spec must have exactly one hidden layer");
    check_shapes(x, y, cfg.spec);
    const ActivationPair act = ActivationPair::by_name(cfg.spec.activation, cfg.spec.clamp_epsilon);

    std::vector<Matrix> w = random_weights(cfg.spec);
    const Matrix xa = with_bias_column(x);
    const Matrix target = act.apply_phi(y);

    if (cfg.hidden == HiddenWeights::solve) {
        // W1 = pinv([1, X]) phi([phi(Y) - 1 w2^T] pinv(W2_nodes))
        count(stats, &SolveStats::peel_chains);
        const Matrix hidden_target = peel(act, target, w[1], 2, cfg.rcond, stats);
        w[0] = layer_pinv(xa, 1, cfg.rcond) * hidden_target;
        count(stats, &SolveStats::layer_solves);
        check_finite(w[0], 1, "weights");
    }

    // W2 = pinv([1, f(X W1)]) phi(Y)
    const Matrix a2 = with_bias_column(act.apply_f(xa * w[0]));
    w[1] = layer_pinv(a2, 2, cfg.rcond) * target;
    count(stats, &SolveStats::layer_solves);
    check_finite(w[1], 2, "weights");
    return Network(cfg.spec, std::move(w));
}

Network train_n_layer(const Matrix& x, const Matrix& y, const KarConfig& cfg, SolveStats* stats) {
    const std::size_t n = cfg.spec.layer_count();
    if (n < 2)
        throw ConfigError("train_n_layer: needs at least one hidden layer");
    check_shapes(x, y, cfg.spec);
    const ActivationPair act = ActivationPair::by_name(cfg.spec.activation, cfg.spec.clamp_epsilon);

    std::vector<Matrix> w = random_weights(cfg.spec);
    const Matrix xa = with_bias_column(x);

    // targets[k] is what [1, A_k] W_{k+1} should equal (0-based layer k).
    std::vector<Matrix> targets(n);
    targets[n - 1] = act.apply_phi(y);

    if (cfg.hidden == HiddenWeights::solve) {
        count(stats, &SolveStats::peel_chains);
        for (std::size_t k = n - 1; k >= 1; --k)
            targets[k - 1] = peel(act, targets[k], w[k], k + 1, cfg.rcond, stats);

        w[0] = layer_pinv(xa, 1, cfg.rcond) * targets[0];
        count(stats, &SolveStats::layer_solves);
        check_finite(w[0], 1, "weights");
    }

    Matrix activation = act.apply_f(xa * w[0]);
    const std::size_t first_solved = cfg.hidden == HiddenWeights::solve ? 1 : n - 1;
    for (std::size_t k = 1; k < n; ++k) {
        const Matrix a = with_bias_column(activation);
        if (k >= first_solved) {
            w[k] = layer_pinv(a, k + 1, cfg.rcond) * targets[k];
            count(stats, &SolveStats::layer_solves);
            check_finite(w[k], k + 1, "weights");
        }
        if (k + 1 < n) {
            activation = act.apply_f(a * w[k]);
            check_finite(activation, k + 1, "activation");
        }
    }
    return Network(cfg.spec, std::move(w));
}

void fill_fit_metrics(TrainReport& report, const Network& net, const Matrix& x, const Matrix& y) {
    const std::vector<Matrix> layers = net.forward_layers(x);
    const Matrix& g = layers.back();
    const Matrix last_input = layers.size() > 1 ? with_bias_column(layers[layers.size() - 2])
                                                : with_bias_column(x);
    report.train_sse = sse(g, y);
    report.transformed_sse = sse(last_input, net.weights().back(), net.activation().apply_phi(y));
    report.train_errors = classification_errors(g, y);
    report.train_error_rate = y.rows() > 0 ? static_cast<double>(report.train_errors)
                                                 / static_cast<double>(y.rows())
                                           : 0.0;
    report.layer_norms.clear();
    for (const Matrix& w : net.weights())
        report.layer_norms.push_back(w.norm());
    report.spec = net.spec();
    report.seed = net.spec().seed;
    report.init = net.spec().init.describe();
}

TrainResult train_kar(const Matrix& x, const Matrix& y, const KarConfig& cfg) {
    SolveStats stats;
    const auto start = std::chrono::steady_clock::now();
    Network net = cfg.spec.hidden.empty() ? train_single_layer(x, y, cfg, &stats)
                                          : train_n_layer(x, y, cfg, &stats);
    const auto stop = std::chrono::steady_clock::now();

    TrainReport report;
    report.trainer = "kar";
    report.wall_time_s = std::chrono::duration<double>(stop - start).count();
    report.solves = stats;
    fill_fit_metrics(report, net, x, y);
    return {std::move(net), std::move(report)};
}

nlohmann::json to_json(const TrainReport& r, bool include_timing) {
    nlohmann::json j = {
        {"trainer", r.trainer},
        {"train_sse", r.train_sse},
        {"transformed_sse", r.transformed_sse},
        {"train_error_rate", r.train_error_rate},
        {"train_errors", r.train_errors},
        {"seed", r.seed},
        {"spec", to_json(r.spec)},
        {"init", r.init},
        {"layer_norms", r.layer_norms},
        {"iterations", r.iterations},
        {"solves",
         {{"layer_solves", r.solves.layer_solves},
          {"peel_chains", r.solves.peel_chains},
          {"peel_inversions", r.solves.peel_inversions}}},
    };
    if (include_timing)
        j["wall_time_s"] = r.wall_time_s;
    return j;
}

} // namespace karnet
