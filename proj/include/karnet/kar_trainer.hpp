#pragma once

#include "karnet/linalg.hpp"
#include "karnet/network.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace karnet {

/// How the trainer treats hidden-layer weights.
enum class HiddenWeights {
    /// Solve every layer from the cross-coupling equations in a single pass.
    solve,
    /// Keep the random hidden layers and solve only the output layer.
    random_fixed,
};

std::string to_string(HiddenWeights h);
HiddenWeights hidden_weights_from_string(const std::string& s);

struct KarConfig {
    NetworkSpec spec;
    std::optional<double> rcond;
    HiddenWeights hidden = HiddenWeights::solve;
};

/// Pseudoinverse bookkeeping of one training call.
struct SolveStats {
    std::size_t layer_solves = 0;    // pinv of [1, activations] (or [1, X]) per layer
    std::size_t peel_chains = 0;     // target back-propagation chains run
    std::size_t peel_inversions = 0; // pinv of node-weight blocks inside the chain
};

struct TrainReport {
    std::string trainer;
    double train_sse = 0.0;       // output space, sum (G - Y)^2
    double transformed_sse = 0.0; // ||[1, A_{n-1}] W_n - phi(Y)||^2
    double train_error_rate = 0.0;
    std::size_t train_errors = 0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
    NetworkSpec spec;
    std::string init;
    std::vector<double> layer_norms;
    std::size_t iterations = 0;
    SolveStats solves;
};

nlohmann::json to_json(const TrainReport& r, bool include_timing = true);

struct TrainResult {
    Network network;
    TrainReport report;
};

/// W1 = pinv([1, X]) phi(Y).
Network train_single_layer(const Matrix& x, const Matrix& y, const KarConfig& cfg,
                           SolveStats* stats = nullptr);

/// Two-layer cross-coupled solution; the spec must have exactly one hidden layer.
Network train_two_layer(const Matrix& x, const Matrix& y, const KarConfig& cfg,
                        SolveStats* stats = nullptr);

/// Single-pass n-layer solution (n >= 2).
///
/// Random node/bias weights of layers 2..n peel phi(Y) back to a target for
/// [1, X] W1; W1 is solved first, then W2..Wn front to back, each against
/// its peeled target using the already-solved earlier layers.
Network train_n_layer(const Matrix& x, const Matrix& y, const KarConfig& cfg,
                      SolveStats* stats = nullptr);

/// Dispatches on layer count, times the call and fills a TrainReport.
TrainResult train_kar(const Matrix& x, const Matrix& y, const KarConfig& cfg);

/// Fills the fit statistics of `report` for `net` on (x, y).
void fill_fit_metrics(TrainReport& report, const Network& net, const Matrix& x, const Matrix& y);

} // namespace karnet
