#include "karnet/errors.hpp"
#include "karnet/kar_trainer.hpp"
#include "karnet/network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using karnet::Matrix;
using karnet::Network;
using karnet::NetworkSpec;

namespace {

NetworkSpec spec_of(std::size_t d, std::vector<std::size_t> hidden, std::size_t q, std::uint64_t seed = 1) {
    NetworkSpec s;
    s.input_dim = d;
    s.hidden = std::move(hidden);
    s.output_dim = q;
    s.seed = seed;
    return s;
}

// Layer-by-layer forward pass written out independently of Network::forward.
Matrix reference_forward(const std::vector<Matrix>& weights, const Matrix& x) {
    auto logit = [](double v) {
        v = std::min(std::max(v, 1e-7), 1.0 - 1e-7);
        return std::log(v / (1.0 - v));
    };
    Matrix a = x;
    for (const Matrix& w : weights) {
        Matrix aug(a.rows(), a.cols() + 1);
        aug.col(0).setOnes();
        aug.rightCols(a.cols()) = a;
        a = (aug * w).unaryExpr(logit);
    }
    return a;
}

} // namespace

TEST(Network, IrisShapes) {
    const Network net = karnet::random_init(spec_of(4, {90}, 3));
    ASSERT_EQ(net.layer_count(), 2u);
    EXPECT_EQ(net.weight(0).rows(), 5);
    EXPECT_EQ(net.weight(0).cols(), 90);
    EXPECT_EQ(net.weight(1).rows(), 91);
    EXPECT_EQ(net.weight(1).cols(), 3);
    EXPECT_EQ(net.parameter_count(), 5u * 90u + 91u * 3u);
}

TEST(Network, BiasPartition) {
    const Network net = karnet::random_init(spec_of(3, {4, 2}, 1));
    for (std::size_t k = 0; k < net.layer_count(); ++k) {
        const Matrix& w = net.weight(k);
        EXPECT_EQ(Matrix(net.bias_weights(k)), w.topRows(1));
        EXPECT_EQ(net.node_weights(k), w.bottomRows(w.rows() - 1));
    }
}

TEST(Network, SeededInitIsDeterministic) {
    const Network a = karnet::random_init(spec_of(4, {6, 5}, 2, 42));
    const Network b = karnet::random_init(spec_of(4, {6, 5}, 2, 42));
    const Network c = karnet::random_init(spec_of(4, {6, 5}, 2, 43));
    bool differs = false;
    for (std::size_t k = 0; k < a.layer_count(); ++k) {
        EXPECT_EQ(a.weight(k), b.weight(k));
        differs = differs || a.weight(k) != c.weight(k);
    }
    EXPECT_TRUE(differs);
}

TEST(Network, InitDrawsFromConfiguredRange) {
    NetworkSpec s = spec_of(9, {20}, 2);
    const Network unit = karnet::random_init(s);
    EXPECT_GT(unit.weight(0).minCoeff(), 0.0);
    EXPECT_LT(unit.weight(0).maxCoeff(), 1.0);
    s.init = karnet::WeightInit::fan_in();
    const Network scaled = karnet::random_init(s);
    EXPECT_LT(scaled.weight(0).maxCoeff(), 0.1);
    EXPECT_LT(scaled.weight(1).maxCoeff(), 1.0 / 21.0);
    EXPECT_EQ(s.init.describe(), "uniform(0,1)/fan_in");
}

TEST(Network, ZeroWeightsGiveTheClampedConstant) {
    const NetworkSpec s = spec_of(2, {3}, 2);
    const Network net(s, {Matrix::Zero(3, 3), Matrix::Zero(4, 2)});
    const Matrix g = net.forward(Matrix::Constant(5, 2, 0.3));
    EXPECT_EQ(g.rows(), 5);
    EXPECT_EQ(g.cols(), 2);
    EXPECT_LE((g.array() + 16.118095550958316).abs().maxCoeff(), 1e-9);
}

TEST(Network, ForwardMatchesReferenceAndIsPure) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> hidden(static_cast<std::size_t>(size(rng) % 4));
        for (auto& h : hidden)
            h = static_cast<std::size_t>(size(rng));
        NetworkSpec s = spec_of(static_cast<std::size_t>(size(rng)), hidden, static_cast<std::size_t>(size(rng)),
                                static_cast<std::uint64_t>(trial));
        s.init = karnet::WeightInit::fan_in();
        const Network net = karnet::random_init(s);
        Matrix x(size(rng), static_cast<Eigen::Index>(s.input_dim));
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x.data()[i] = u(rng);
        const Matrix g = net.forward(x);
        ASSERT_EQ(g.rows(), x.rows());
        ASSERT_EQ(g.cols(), static_cast<Eigen::Index>(s.output_dim));
        EXPECT_LE((g - reference_forward(net.weights(), x)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_EQ(g, net.forward(x));
        const auto layers = net.forward_layers(x);
        EXPECT_EQ(layers.size(), net.layer_count());
        EXPECT_EQ(layers.back(), g);
    }
}

TEST(Network, SingleLayerSolutionReproducesTargets) {
    // m = d + 1 = 3 rows: [1, X] is square and invertible.
    const Matrix x = (Matrix(3, 2) << 0.1, 0.7, 0.8, 0.2, 0.5, 0.9).finished();
    const Matrix y = (Matrix(3, 2) << 0.2, 0.9, 0.6, 0.1, 0.35, 0.5).finished();
    karnet::KarConfig cfg;
    cfg.spec = spec_of(2, {}, 2);
    const Network net = karnet::train_single_layer(x, y, cfg);
    EXPECT_LE((net.forward(x) - y).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Network, InputWidthMismatchIsADimensionError) {
    const Network net = karnet::random_init(spec_of(3, {2}, 1));
    EXPECT_THROW(net.forward(Matrix::Ones(4, 2)), karnet::DimensionError);
}

TEST(Network, RejectsBadShapesAndSpecs) {
    EXPECT_THROW(Network(spec_of(2, {3}, 1), {Matrix::Zero(3, 3)}), karnet::DimensionError);
    EXPECT_THROW(Network(spec_of(2, {3}, 1), {Matrix::Zero(3, 3), Matrix::Zero(3, 1)}), karnet::DimensionError);
    EXPECT_THROW(karnet::random_init(spec_of(0, {3}, 1)), karnet::ConfigError);
    EXPECT_THROW(karnet::random_init(spec_of(2, {0}, 1)), karnet::ConfigError);
    NetworkSpec bad = spec_of(2, {3}, 1);
    bad.activation = "tanh";
    EXPECT_THROW(karnet::random_init(bad), karnet::ConfigError);
}

TEST(Network, JsonRoundTripIsBitExact) {
    NetworkSpec s = spec_of(3, {5, 4}, 2, 77);
    s.init = karnet::WeightInit::fan_in();
    const Network net = karnet::random_init(s);
    const std::string text = karnet::to_json(net).dump();
    const Network back = karnet::network_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back.spec().seed, 77u);
    EXPECT_EQ(back.spec().hidden, s.hidden);
    EXPECT_TRUE(back.spec().init.fan_in_scaled);
    ASSERT_EQ(back.layer_count(), net.layer_count());
    for (std::size_t k = 0; k < net.layer_count(); ++k)
        EXPECT_EQ(back.weight(k), net.weight(k));
}

TEST(Network, MatrixJsonIsRowMajor) {
    const Matrix m = (Matrix(2, 3) << 1, 2, 3, 4, 5, 6).finished();
    const auto j = karnet::matrix_to_json(m);
    EXPECT_EQ(j.at("rows"), 2);
    EXPECT_EQ(j.at("cols"), 3);
    EXPECT_EQ(j.at("data"), nlohmann::json({1.0, 2.0, 3.0, 4.0, 5.0, 6.0}));
    EXPECT_EQ(karnet::matrix_from_json(j), m);
    auto broken = j;
    broken["data"].erase(0);
    EXPECT_THROW(karnet::matrix_from_json(broken), karnet::DimensionError);
}
