#include "karnet/linalg.hpp"

#include "karnet/errors.hpp"

#include <algorithm>
#include <limits>

namespace karnet {

std::string shape_of(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_finite(const Matrix& m, const std::string& what) {
    if (!m.allFinite())
        throw NumericalError(what + ": non-finite entry in " + shape_of(m) + " matrix");
}

PinvResult pinv(const Matrix& a, std::optional<double> rcond) {
    if (a.size() == 0)
        throw DimensionError("pinv: empty matrix");
    require_finite(a, "pinv");

    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("pinv: SVD failed to converge on " + shape_of(a) + " matrix");

    const auto& sv = svd.singularValues();
    const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    const double factor = rcond ? *rcond
                                : static_cast<double>(std::max(a.rows(), a.cols()))
                                      * std::numeric_limits<double>::epsilon();

    PinvResult out;
    out.tolerance = factor * sigma_max;

    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > out.tolerance) {
            inv(i) = 1.0 / sv(i);
            ++out.rank;
        }
    }
    out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    return out;
}

Matrix solve_least_squares(const Matrix& a, const Matrix& b, std::optional<double> rcond) {
    if (a.rows() != b.rows())
        throw DimensionError("solve_least_squares: A is " + shape_of(a) + " but B is " + shape_of(b));
    return pinv(a, rcond).pinv * b;
}

double sse(const Matrix& a, const Matrix& theta, const Matrix& b) {
    if (a.cols() != theta.rows() || a.rows() != b.rows() || theta.cols() != b.cols())
        throw DimensionError("sse: shapes " + shape_of(a) + " * " + shape_of(theta) + " vs "
                             + shape_of(b) + " do not conform");
    return (a * theta - b).squaredNorm();
}

double sse(const Matrix& g, const Matrix& y) {
    if (g.rows() != y.rows() || g.cols() != y.cols())
        throw DimensionError("sse: " + shape_of(g) + " vs " + shape_of(y));
    return (g - y).squaredNorm();
}

Matrix with_bias_column(const Matrix& m) {
    Matrix out(m.rows(), m.cols() + 1);
    out.col(0).setOnes();
    out.rightCols(m.cols()) = m;
    return out;
}

} // namespace karnet
