#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace karnet {

/// Dense real matrix used for data, weights and targets.
using Matrix = Eigen::MatrixXd;

struct PinvResult {
    Matrix pinv;      // cols x rows
    Eigen::Index rank = 0;
    double tolerance = 0.0;
};

/// "3x4" style shape label for error messages.
std::string shape_of(const Matrix& m);

/// Throws NumericalError if any entry is NaN or infinite.
void require_finite(const Matrix& m, const std::string& what);

/// Moore-Penrose pseudoinverse through a thin SVD.
///
/// Singular values at or below the cutoff are treated as zero. Without
/// `rcond` the cutoff is max(rows, cols) * machine epsilon * sigma_max;
/// with it, the cutoff is rcond * sigma_max.
PinvResult pinv(const Matrix& a, std::optional<double> rcond = std::nullopt);

/// Minimum-norm least-squares solution of A * Theta = B, i.e. pinv(A) * B.
Matrix solve_least_squares(const Matrix& a, const Matrix& b,
                           std::optional<double> rcond = std::nullopt);

/// Sum of squared errors trace((A Theta - B)^T (A Theta - B)).
double sse(const Matrix& a, const Matrix& theta, const Matrix& b);

/// Sum of squared entries of (g - y).
double sse(const Matrix& g, const Matrix& y);

/// [1, m]: prepends a column of ones.
Matrix with_bias_column(const Matrix& m);

} // namespace karnet
