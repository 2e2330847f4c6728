#pragma once

#include "karnet/activation.hpp"
#include "karnet/linalg.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace karnet {

/// Distribution used to draw initial weights: i.i.d. uniform on (lo, hi),
/// optionally divided by the layer fan-in (rows of the weight matrix).
struct WeightInit {
    double lo = 0.0;
    double hi = 1.0;
    bool fan_in_scaled = false;

    /// Positive uniform draws scaled by fan-in, so that [1, x] W stays in
    /// (0, 1) whenever every x lies in (0, 1).
    static WeightInit fan_in() { return {0.0, 1.0, true}; }

    std::string describe() const;
};

struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden;
    std::size_t output_dim = 0;
    std::string activation = "logit-sigmoid";
    double clamp_epsilon = ActivationPair::default_epsilon;
    std::uint64_t seed = 0;
    WeightInit init;

    /// Number of weight layers n = hidden.size() + 1.
    std::size_t layer_count() const noexcept { return hidden.size() + 1; }

    /// [d, h1, ..., h_{n-1}, q]
    std::vector<std::size_t> layer_sizes() const;

    /// Throws ConfigError on a zero size or an unknown activation.
    void validate() const;
};

/// Fully-connected feedforward network G = f([1, ... f([1, X] W1) ...] Wn).
///
/// Layer k has weights of shape (fan_in + 1) x fan_out; row 0 holds the bias
/// weights and the remaining rows the node weights.
class Network {
public:
    Network(NetworkSpec spec, std::vector<Matrix> weights);

    const NetworkSpec& spec() const noexcept { return spec_; }
    const ActivationPair& activation() const noexcept { return activation_; }
    const std::vector<Matrix>& weights() const noexcept { return weights_; }
    const Matrix& weight(std::size_t layer) const { return weights_.at(layer); }
    std::size_t layer_count() const noexcept { return weights_.size(); }

    /// First row of layer `layer`'s weights (bias weights, transposed).
    Eigen::RowVectorXd bias_weights(std::size_t layer) const { return weights_.at(layer).row(0); }

    /// Node weights: every row of the layer's weights except the bias row.
    Matrix node_weights(std::size_t layer) const {
        const Matrix& w = weights_.at(layer);
        return w.bottomRows(w.rows() - 1);
    }

    /// m x q network output for raw m x d inputs.
    Matrix forward(const Matrix& x) const;

    /// Post-activation outputs of every layer; the last entry equals forward(x).
    std::vector<Matrix> forward_layers(const Matrix& x) const;

    std::size_t parameter_count() const noexcept;

private:
    NetworkSpec spec_;
    ActivationPair activation_;
    std::vector<Matrix> weights_;
};

/// Draws every layer from the spec's seeded generator; equal specs give
/// bitwise-equal networks.
Network random_init(const NetworkSpec& spec);

/// Raw weight matrices for `spec`, drawn as random_init does.
std::vector<Matrix> random_weights(const NetworkSpec& spec);

nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j);

/// Spec, seed and row-major weight values; round-trips bit-exactly.
nlohmann::json to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

} // namespace karnet
