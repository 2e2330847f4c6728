#pragma once

#include "karnet/baseline_gd.hpp"
#include "karnet/data.hpp"
#include "karnet/kar_trainer.hpp"
#include "karnet/metrics.hpp"
#include "karnet/network.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace karnet {

enum class TrainerKind { kar, gd };

std::string to_string(TrainerKind t);
TrainerKind trainer_kind_from_string(const std::string& s);

/// How a single hidden size h from a sweep grid becomes hidden layers.
enum class ArchPattern {
    two_layer,   // [h]
    exponential, // [4h, 2h, h]
};

std::string to_string(ArchPattern a);
ArchPattern arch_pattern_from_string(const std::string& s);
std::vector<std::size_t> hidden_layers_for(ArchPattern pattern, std::size_t h);

/// Parses "90", "3,3,3,3" or "exp:10" (= 40,20,10) into hidden sizes.
std::vector<std::size_t> parse_layers(const std::string& text);

/// Parses a comma-separated list of counts; "79-93" ranges are expanded.
std::vector<std::size_t> parse_counts(const std::string& text);

/// The default hidden-size model-selection grid.
const std::vector<std::size_t>& default_hidden_grid();

struct ExperimentConfig {
    std::string data = "iris";       // CSV path or builtin name (iris, xor)
    int label_col = -1;
    bool header = true;
    std::vector<std::size_t> layers; // fixed hidden sizes
    ArchPattern arch = ArchPattern::two_layer;
    std::vector<std::size_t> grid;   // hidden-size grid; empty means use `layers`
    TrainerKind trainer = TrainerKind::kar;
    HiddenWeights hidden = HiddenWeights::solve;
    WeightInit init;
    std::optional<double> rcond;
    std::string activation = "logit-sigmoid";
    double scale_epsilon = 0.05;
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    std::size_t folds = 10;
    std::size_t inner_folds = 10;
    std::size_t per_class = 30;      // iris-sweep training samples per class
    // gradient-descent baseline
    double learning_rate = 1e-3;
    std::size_t gd_iters = 500;
    std::optional<double> gd_clip = 10.0;
    std::filesystem::path out = ".";

    void validate() const;
};

/// Independent 64-bit seed for (seed, a, b) via std::seed_seq.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Resolves `cfg.data` (builtin name or CSV path).
Dataset load_dataset(const ExperimentConfig& cfg);

/// Trains one network with the configured trainer kind.
TrainResult train_model(const Matrix& x, const Matrix& y, const ExperimentConfig& cfg,
                        const std::vector<std::size_t>& hidden, std::uint64_t seed);

struct FoldResult {
    std::size_t trial = 0;
    std::size_t fold = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden;
    std::size_t test_count = 0;
    double accuracy = 0.0;
    double error_rate = 0.0;
    double test_sse = 0.0;
    double train_sse = 0.0;
    double train_time_s = 0.0;
};

struct EvalReport {
    std::string command;
    std::string trainer;
    std::string dataset;
    std::vector<std::uint64_t> trial_seeds;
    std::vector<std::vector<std::size_t>> fold_assignments; // per trial
    std::vector<FoldResult> folds;
    double mean_accuracy = 0.0;
    double mean_error_rate = 0.0;
    double mean_test_sse = 0.0;
    double mean_train_sse = 0.0;
    double total_train_time_s = 0.0;
    double mean_train_time_s = 0.0;

    /// Recomputes the aggregates from `folds`.
    void aggregate();
};

/// Keys ending in "_time_s" carry wall-clock values; everything else is
/// deterministic for a fixed seed and config.
nlohmann::json to_json(const EvalReport& r, bool include_timing = true);

/// Removes every "*_time_s" key, recursively.
nlohmann::json strip_timing(nlohmann::json j);

/// Outer stratified k-fold x trials. With a grid, the hidden size is chosen
/// per outer fold by an inner stratified CV on the training part only (ties
/// go to the smaller size); otherwise cfg.layers is used.
EvalReport run_cv(const ExperimentConfig& cfg);
EvalReport run_cv(const Dataset& ds, const ExperimentConfig& cfg);

/// Accuracy of always predicting the most frequent training class.
double majority_accuracy(const Dataset& train, const Dataset& test);

struct XorDemoResult {
    Matrix two_layer_outputs;  // 4 x 1
    Matrix five_layer_outputs; // 4 x 1
    TrainReport two_layer;
    TrainReport five_layer;
    Network two_layer_net;
    Network five_layer_net;
};

/// Trains the 2-layer (h = 2) and 5-layer (3-3-3-3-1) analytic nets on the
/// perturbed XOR data.
XorDemoResult run_xor_demo(const ExperimentConfig& cfg);

/// Writes the forward values of both nets on a 101 x 101 grid over [0, 1]^2.
void write_surface_csv(const XorDemoResult& r, std::ostream& out, std::size_t steps = 101);

nlohmann::json to_json(const XorDemoResult& r, bool include_timing = true);

struct SweepRow {
    std::size_t h = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double sse = 0.0;
    double transformed_sse = 0.0;
    double train_error = 0.0;
    double test_error = 0.0;
    double train_time_s = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::string hidden_policy;
    std::string init;
};

/// Hidden-size sweep of two-layer nets on the first `per_class` samples per
/// class; hidden sizes come from cfg.grid.
SweepReport run_iris_sweep(const ExperimentConfig& cfg);
SweepReport run_iris_sweep(const Dataset& ds, const ExperimentConfig& cfg);

void write_sweep_csv(const SweepReport& r, std::ostream& out);
nlohmann::json to_json(const SweepReport& r, bool include_timing = true);

struct GradientCheckReport {
    std::vector<double> max_relative_errors;
    double worst = 0.0;
};

/// Gradient check on `trials` random small networks (at most 200 weights).
GradientCheckReport run_gradient_check(const ExperimentConfig& cfg);

nlohmann::json to_json(const GradientCheckReport& r);

} // namespace karnet
