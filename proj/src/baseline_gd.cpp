#include "karnet/baseline_gd.hpp"

#include "karnet/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace karnet {

void GdConfig::validate() const {
    spec.validate();
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw ConfigError("gd: learning rate must be finite and non-negative");
    if (max_iters < 1)
        throw ConfigError("gd: max_iters must be >= 1");
    if (gradient_clip && !(*gradient_clip > 0.0))
        throw ConfigError("gd: gradient clip must be positive");
}

std::vector<Matrix> sse_gradient(const Network& net, const Matrix& x, const Matrix& y) {
    const ActivationPair& act = net.activation();
    const auto& weights = net.weights();
    const std::size_t n = weights.size();
    if (x.cols() != static_cast<Eigen::Index>(net.spec().input_dim) || x.rows() != y.rows()
        || y.cols() != static_cast<Eigen::Index>(net.spec().output_dim))
        throw DimensionError("sse_gradient: X " + shape_of(x) + " and Y " + shape_of(y)
                             + " do not fit the network");

    // inputs[k] = [1, A_{k-1}], pre[k] = inputs[k] * W_k
    std::vector<Matrix> inputs(n);
    std::vector<Matrix> pre(n);
    Matrix a = x;
    for (std::size_t k = 0; k < n; ++k) {
        inputs[k] = with_bias_column(a);
        pre[k] = inputs[k] * weights[k];
        a = act.apply_f(pre[k]);
    }

    std::vector<Matrix> grads(n);
    Matrix delta = 2.0 * (a - y);
    for (std::size_t k = n; k-- > 0;) {
        const Matrix dz = delta.cwiseProduct(pre[k].unaryExpr([&act](double z) { return act.f_derivative(z); }));
        grads[k] = inputs[k].transpose() * dz;
        if (k > 0)
            delta = dz * weights[k].bottomRows(weights[k].rows() - 1).transpose();
    }
    return grads;
}

GdResult train_gd(const Matrix& x, const Matrix& y, const GdConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    std::vector<Matrix> weights = random_weights(cfg.spec);
    std::vector<double> history;
    std::size_t iters = 0;
    for (;;) {
        const Network net(cfg.spec, weights);
        const double loss = sse(net.forward(x), y);
        if (!std::isfinite(loss))
            throw NumericalError("gd: non-finite SSE at iteration " + std::to_string(iters),
                                 static_cast<long>(iters));
        history.push_back(loss);
        if (loss < cfg.sse_tolerance || iters >= cfg.max_iters)
            break;

        std::vector<Matrix> grads = sse_gradient(net, x, y);
        double scale = cfg.learning_rate;
        if (cfg.gradient_clip) {
            double norm2 = 0.0;
            for (const Matrix& g : grads)
                norm2 += g.squaredNorm();
            const double norm = std::sqrt(norm2);
            if (norm > *cfg.gradient_clip)
                scale *= *cfg.gradient_clip / norm;
        }
        for (std::size_t k = 0; k < weights.size(); ++k)
            weights[k] -= scale * grads[k];
        ++iters;
    }
    const auto stop = std::chrono::steady_clock::now();

    Network net(cfg.spec, std::move(weights));
    TrainReport report;
    report.trainer = "gd";
    report.iterations = iters;
    report.wall_time_s = std::chrono::duration<double>(stop - start).count();
    fill_fit_metrics(report, net, x, y);
    return {std::move(net), std::move(report), std::move(history)};
}

double check_gradient(const Network& net, const Matrix& x, const Matrix& y, double step) {
    const std::vector<Matrix> analytic = sse_gradient(net, x, y);
    std::vector<Matrix> weights = net.weights();
    double worst = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        for (Eigen::Index i = 0; i < weights[k].rows(); ++i) {
            for (Eigen::Index j = 0; j < weights[k].cols(); ++j) {
                const double orig = weights[k](i, j);
                weights[k](i, j) = orig + step;
                const double up = sse(Network(net.spec(), weights).forward(x), y);
                weights[k](i, j) = orig - step;
                const double down = sse(Network(net.spec(), weights).forward(x), y);
                weights[k](i, j) = orig;

                const double numeric = (up - down) / (2.0 * step);
                const double a = analytic[k](i, j);
                const double denom = std::max({std::abs(a), std::abs(numeric), 1e-7});
                worst = std::max(worst, std::abs(a - numeric) / denom);
            }
        }
    }
    return worst;
}

} // namespace karnet
