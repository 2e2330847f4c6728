#pragma once

#include "karnet/kar_trainer.hpp"
#include "karnet/linalg.hpp"
#include "karnet/network.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace karnet {

/// Full-batch gradient descent on the output-space SSE, used as the
/// iterative comparison baseline for the analytic trainer.
struct GdConfig {
    NetworkSpec spec;
    double learning_rate = 1e-3;
    std::size_t max_iters = 500;
    double sse_tolerance = 1e-8;
    /// Rescales the whole gradient to this Euclidean norm when it is larger.
    std::optional<double> gradient_clip;

    void validate() const;
};

struct GdResult {
    Network network;
    TrainReport report;
    /// SSE before each update; front() is the SSE of the initial network.
    std::vector<double> sse_history;
};

/// Gradient of sum (G - Y)^2 with respect to every weight matrix.
///
/// The activation derivative is that of the clamped map, so the result is
/// the exact derivative of what forward() computes away from clamp edges.
std::vector<Matrix> sse_gradient(const Network& net, const Matrix& x, const Matrix& y);

GdResult train_gd(const Matrix& x, const Matrix& y, const GdConfig& cfg);

/// Largest relative difference between sse_gradient and central finite
/// differences with step `step`. Each entry's error is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-7).
double check_gradient(const Network& net, const Matrix& x, const Matrix& y, double step = 1e-5);

} // namespace karnet
