#include "karnet/baseline_gd.hpp"
#include "karnet/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using karnet::GdConfig;
using karnet::Matrix;

namespace {

GdConfig config(std::size_t d, std::vector<std::size_t> hidden, std::size_t q, std::uint64_t seed = 1) {
    GdConfig cfg;
    cfg.spec.input_dim = d;
    cfg.spec.hidden = std::move(hidden);
    cfg.spec.output_dim = q;
    cfg.spec.seed = seed;
    cfg.spec.init = karnet::WeightInit::fan_in();
    return cfg;
}

Matrix uniform(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double lo = 0.05, double hi = 0.95) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = u(rng);
    return m;
}

// Ten 2-D points split by x1 + x2 = 1, targets in logit space.
void separable(Matrix& x, Matrix& y) {
    x.resize(10, 2);
    x << 0.1, 0.2, 0.2, 0.3, 0.3, 0.1, 0.15, 0.5, 0.4, 0.3, 0.9, 0.8, 0.7, 0.6, 0.8, 0.9, 0.6, 0.7, 0.85, 0.5;
    y.resize(10, 1);
    y << -1, -1, -1, -1, -1, 1, 1, 1, 1, 1;
}

// True when every pre-activation of the initial net sits strictly inside the
// logit domain, where the loss is smooth.
bool interior(const karnet::Network& net, const Matrix& x) {
    const auto outs = net.forward_layers(x);
    for (std::size_t k = 0; k < net.layer_count(); ++k) {
        const Matrix& in = k == 0 ? x : outs[k - 1];
        const Matrix& w = net.weight(k);
        const Matrix z = (in * w.bottomRows(w.rows() - 1)).rowwise() + w.row(0);
        if (z.minCoeff() <= 1e-3 || z.maxCoeff() >= 1.0 - 1e-3)
            return false;
    }
    return true;
}

std::uint64_t interior_seed(GdConfig cfg, const Matrix& x, std::uint64_t from) {
    for (std::uint64_t seed = from; seed < from + 5000; ++seed) {
        cfg.spec.seed = seed;
        if (interior(karnet::random_init(cfg.spec), x))
            return seed;
    }
    ADD_FAILURE() << "no interior start found";
    return from;
}

} // namespace

TEST(Gradient, MatchesFiniteDifferencesOnRandomNets) {
    std::mt19937_64 rng(31);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t d = 1 + seed % 4;
        const std::vector<std::size_t> hidden = seed % 3 == 0 ? std::vector<std::size_t>{}
                                                              : std::vector<std::size_t>(1 + seed % 2, 3 + seed % 3);
        const std::size_t q = 1 + seed % 3;
        const auto cfg = config(d, hidden, q, seed);
        const auto net = karnet::random_init(cfg.spec);
        ASSERT_LE(net.parameter_count(), 200u);
        const Matrix x = uniform(rng, 6, static_cast<Eigen::Index>(d));
        const Matrix y = uniform(rng, 6, static_cast<Eigen::Index>(q), -1.0, 1.0);
        EXPECT_LE(karnet::check_gradient(net, x, y), 1e-4) << "seed " << seed;
    }
}

TEST(Gradient, SingleRowInput) {
    const auto cfg = config(3, {4}, 2, 8);
    const auto net = karnet::random_init(cfg.spec);
    const Matrix x = Matrix::Constant(1, 3, 0.5);
    const Matrix y = (Matrix(1, 2) << 0.3, -0.2).finished();
    EXPECT_LE(karnet::check_gradient(net, x, y), 1e-4);
}

TEST(Gradient, VanishesAtAnExactFit) {
    std::mt19937_64 rng(32);
    const auto cfg = config(3, {5}, 2, 4);
    const auto net = karnet::random_init(cfg.spec);
    const Matrix x = uniform(rng, 8, 3);
    const Matrix y = net.forward(x);
    double norm2 = 0.0;
    for (const Matrix& g : karnet::sse_gradient(net, x, y))
        norm2 += g.squaredNorm();
    EXPECT_LE(std::sqrt(norm2), 1e-8);
}

TEST(Gradient, ShapeMismatchIsADimensionError) {
    const auto net = karnet::random_init(config(3, {2}, 1).spec);
    EXPECT_THROW(karnet::sse_gradient(net, Matrix::Ones(4, 2), Matrix::Ones(4, 1)), karnet::DimensionError);
}

TEST(Descent, ExactFitNeedsNoIterations) {
    std::mt19937_64 rng(33);
    const auto cfg = config(2, {3}, 1, 6);
    const Matrix x = uniform(rng, 5, 2);
    const Matrix y = karnet::random_init(cfg.spec).forward(x);
    const auto r = karnet::train_gd(x, y, cfg);
    EXPECT_EQ(r.report.iterations, 0u);
    ASSERT_EQ(r.sse_history.size(), 1u);
    EXPECT_EQ(r.report.train_sse, r.sse_history.front());
}

TEST(Descent, ZeroLearningRateLeavesWeightsUnchanged) {
    std::mt19937_64 rng(34);
    auto cfg = config(2, {3}, 1, 7);
    cfg.learning_rate = 0.0;
    cfg.max_iters = 25;
    const Matrix x = uniform(rng, 6, 2);
    const Matrix y = uniform(rng, 6, 1);
    const auto r = karnet::train_gd(x, y, cfg);
    const auto init = karnet::random_weights(cfg.spec);
    EXPECT_EQ(r.report.iterations, 25u);
    for (std::size_t k = 0; k < init.size(); ++k)
        EXPECT_EQ(r.network.weight(k), init[k]);
}

TEST(Descent, SeparableSetDecreasesStrictly) {
    Matrix x;
    Matrix y;
    separable(x, y);
    auto cfg = config(2, {4}, 1);
    cfg.spec.seed = interior_seed(cfg, x, 1);
    cfg.learning_rate = 1e-4;
    cfg.max_iters = 10;
    const auto r = karnet::train_gd(x, y, cfg);
    ASSERT_EQ(r.sse_history.size(), 11u);
    for (std::size_t i = 1; i < r.sse_history.size(); ++i)
        EXPECT_LT(r.sse_history[i], r.sse_history[i - 1]) << i;
}

TEST(Descent, SmallStepsNeverIncreaseSse) {
    std::mt19937_64 rng(35);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto cfg = config(3, {4}, 1);
        const Matrix x = uniform(rng, 12, 3);
        cfg.spec.seed = interior_seed(cfg, x, 10000 * seed);
        cfg.learning_rate = 1e-5;
        cfg.max_iters = 30;
        const Matrix y = uniform(rng, 12, 1, -1.0, 1.0);
        const auto r = karnet::train_gd(x, y, cfg);
        for (std::size_t i = 1; i < r.sse_history.size(); ++i)
            EXPECT_LE(r.sse_history[i], r.sse_history[i - 1] + 1e-12) << "trial " << seed << " step " << i;
    }
}

TEST(Descent, ReportRecordsIterations) {
    std::mt19937_64 rng(36);
    auto cfg = config(2, {3}, 1, 2);
    cfg.max_iters = 17;
    const auto r = karnet::train_gd(uniform(rng, 5, 2), uniform(rng, 5, 1), cfg);
    EXPECT_EQ(r.report.trainer, "gd");
    EXPECT_EQ(r.report.iterations, 17u);
    EXPECT_EQ(r.sse_history.size(), 18u);
    EXPECT_EQ(karnet::to_json(r.report, false).at("iterations"), 17);
}

TEST(Descent, NonFiniteLossNamesTheIteration) {
    auto cfg = config(1, {}, 1, 1);
    cfg.max_iters = 3;
    const Matrix x = Matrix::Constant(2, 1, 0.5);
    Matrix y = Matrix::Zero(2, 1);
    y(1, 0) = std::numeric_limits<double>::infinity();
    try {
        karnet::train_gd(x, y, cfg);
        FAIL() << "expected a numerical failure";
    } catch (const karnet::NumericalError& e) {
        EXPECT_EQ(e.index(), 0);
    }
}

TEST(Descent, InvalidConfigIsRejected) {
    auto cfg = config(2, {3}, 1);
    cfg.learning_rate = -1.0;
    EXPECT_THROW(cfg.validate(), karnet::ConfigError);
    cfg = config(2, {3}, 1);
    cfg.max_iters = 0;
    EXPECT_THROW(cfg.validate(), karnet::ConfigError);
    cfg = config(2, {3}, 1);
    cfg.gradient_clip = 0.0;
    EXPECT_THROW(cfg.validate(), karnet::ConfigError);
}
