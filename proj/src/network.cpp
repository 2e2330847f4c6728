#include "karnet/network.hpp"

#include "karnet/errors.hpp"

#include <random>
#include <sstream>

namespace karnet {

std::string WeightInit::describe() const {
    std::ostringstream os;
    os << "uniform(" << lo << "," << hi << ")";
    if (fan_in_scaled)
        os << "/fan_in";
    return os.str();
}

std::vector<std::size_t> NetworkSpec::layer_sizes() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(hidden.size() + 2);
    sizes.push_back(input_dim);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(output_dim);
    return sizes;
}

void NetworkSpec::validate() const {
    if (input_dim == 0 || output_dim == 0)
        throw ConfigError("network spec: input and output dimensions must be >= 1");
    for (std::size_t h : hidden)
        if (h == 0)
            throw ConfigError("network spec: hidden layer sizes must be >= 1");
    if (!(init.hi >= init.lo))
        throw ConfigError("network spec: weight init range is empty");
    (void)ActivationPair::by_name(activation, clamp_epsilon);
}

Network::Network(NetworkSpec spec, std::vector<Matrix> weights)
    : spec_(std::move(spec)),
      activation_((spec_.validate(), ActivationPair::by_name(spec_.activation, spec_.clamp_epsilon))),
      weights_(std::move(weights)) {
    const auto sizes = spec_.layer_sizes();
    if (weights_.size() != spec_.layer_count())
        throw DimensionError("network: expected " + std::to_string(spec_.layer_count())
                             + " weight matrices, got " + std::to_string(weights_.size()));
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        const auto rows = static_cast<Eigen::Index>(sizes[k] + 1);
        const auto cols = static_cast<Eigen::Index>(sizes[k + 1]);
        if (weights_[k].rows() != rows || weights_[k].cols() != cols)
            throw DimensionError("network: layer " + std::to_string(k + 1) + " weights are "
                                 + shape_of(weights_[k]) + ", expected " + std::to_string(rows)
                                 + "x" + std::to_string(cols));
        require_finite(weights_[k], "network layer " + std::to_string(k + 1));
    }
}

std::vector<Matrix> Network::forward_layers(const Matrix& x) const {
    if (x.cols() != static_cast<Eigen::Index>(spec_.input_dim))
        throw DimensionError("forward: input is " + shape_of(x) + " but the network expects "
                             + std::to_string(spec_.input_dim) + " features");
    std::vector<Matrix> out;
    out.reserve(weights_.size());
    const Matrix* prev = &x;
    for (const Matrix& w : weights_) {
        out.push_back(activation_.apply_f(with_bias_column(*prev) * w));
        prev = &out.back();
    }
    return out;
}

Matrix Network::forward(const Matrix& x) const {
    return std::move(forward_layers(x).back());
}

std::size_t Network::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const Matrix& w : weights_)
        n += static_cast<std::size_t>(w.size());
    return n;
}

std::vector<Matrix> random_weights(const NetworkSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unif(spec.init.lo, spec.init.hi);
    const auto sizes = spec.layer_sizes();

    std::vector<Matrix> weights;
    weights.reserve(spec.layer_count());
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
        const auto rows = static_cast<Eigen::Index>(sizes[k] + 1);
        const auto cols = static_cast<Eigen::Index>(sizes[k + 1]);
        const double scale = spec.init.fan_in_scaled ? 1.0 / static_cast<double>(rows) : 1.0;
        Matrix w(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                w(i, j) = (spec.init.hi > spec.init.lo ? unif(rng) : spec.init.lo) * scale;
        weights.push_back(std::move(w));
    }
    return weights;
}

Network random_init(const NetworkSpec& spec) {
    return Network(spec, random_weights(spec));
}

nlohmann::json matrix_to_json(const Matrix& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            data.push_back(m(i, j));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (rows < 1 || cols < 1 || data.size() != static_cast<std::size_t>(rows * cols))
        throw DimensionError("matrix json: data length does not match " + std::to_string(rows)
                             + "x" + std::to_string(cols));
    Matrix m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2)
            m(i, j2) = data[idx++].get<double>();
    return m;
}

nlohmann::json to_json(const NetworkSpec& spec) {
    return {
        {"input_dim", spec.input_dim},
        {"hidden", spec.hidden},
        {"output_dim", spec.output_dim},
        {"activation", spec.activation},
        {"clamp_epsilon", spec.clamp_epsilon},
        {"seed", spec.seed},
        {"init", {{"lo", spec.init.lo}, {"hi", spec.init.hi}, {"fan_in_scaled", spec.init.fan_in_scaled}}},
    };
}

NetworkSpec network_spec_from_json(const nlohmann::json& j) {
    NetworkSpec spec;
    spec.input_dim = j.at("input_dim").get<std::size_t>();
    spec.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    spec.output_dim = j.at("output_dim").get<std::size_t>();
    spec.activation = j.value("activation", spec.activation);
    spec.clamp_epsilon = j.value("clamp_epsilon", spec.clamp_epsilon);
    spec.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("init")) {
        const auto& init = j.at("init");
        spec.init.lo = init.value("lo", 0.0);
        spec.init.hi = init.value("hi", 1.0);
        spec.init.fan_in_scaled = init.value("fan_in_scaled", false);
    }
    return spec;
}

nlohmann::json to_json(const Network& net) {
    nlohmann::json weights = nlohmann::json::array();
    for (const Matrix& w : net.weights())
        weights.push_back(matrix_to_json(w));
    return {{"spec", to_json(net.spec())}, {"seed", net.spec().seed}, {"weights", std::move(weights)}};
}

Network network_from_json(const nlohmann::json& j) {
    NetworkSpec spec = network_spec_from_json(j.at("spec"));
    std::vector<Matrix> weights;
    for (const auto& w : j.at("weights"))
        weights.push_back(matrix_from_json(w));
    return Network(std::move(spec), std::move(weights));
}

} // namespace karnet
