#include "karnet/activation.hpp"

#include "karnet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace karnet {

namespace {

double logit(double x) { return std::log(x) - std::log1p(-x); }

double sigmoid(double y) {
    if (y >= 0.0)
        return 1.0 / (1.0 + std::exp(-y));
    const double e = std::exp(y);
    return e / (1.0 + e);
}

double logit_derivative(double x) { return 1.0 / (x * (1.0 - x)); }

} // namespace

ActivationPair::ActivationPair(std::string name, double lo, double hi, double eps, Fn f, Fn phi, Fn df)
    : name_(std::move(name)), lo_(lo), hi_(hi), eps_(eps), f_(f), phi_(phi), df_(df) {
    if (!(eps > 0.0) || !(2.0 * eps < hi - lo))
        throw ConfigError("activation '" + name_ + "': clamp epsilon must lie in (0, (hi - lo) / 2)");
}

ActivationPair ActivationPair::logit_sigmoid(double epsilon) {
    return ActivationPair("logit-sigmoid", 0.0, 1.0, epsilon, &logit, &sigmoid, &logit_derivative);
}

ActivationPair ActivationPair::by_name(const std::string& name, double epsilon) {
    if (name == "logit-sigmoid" || name == "logit")
        return logit_sigmoid(epsilon);
    throw ConfigError("unknown activation '" + name + "'");
}

double ActivationPair::clamp(double x) const noexcept {
    // NaN maps to the lower bound so downstream values stay finite.
    if (std::isnan(x))
        return lo_ + eps_;
    return std::clamp(x, lo_ + eps_, hi_ - eps_);
}

double ActivationPair::f_derivative(double x) const noexcept {
    if (x < lo_ + eps_ || x > hi_ - eps_)
        return 0.0;
    return df_(x);
}

Matrix ActivationPair::apply_f(const Matrix& m) const {
    return m.unaryExpr([this](double x) { return f(x); });
}

Matrix ActivationPair::apply_phi(const Matrix& m) const {
    return m.unaryExpr([this](double y) { return phi(y); });
}

} // namespace karnet
