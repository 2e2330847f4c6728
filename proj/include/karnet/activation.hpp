#pragma once

#include "karnet/linalg.hpp"

#include <string>

namespace karnet {

/// An elementwise activation f together with its inverse phi.
///
/// f is defined on the open interval (lo, hi). Inputs to f and outputs of
/// phi are clamped to [lo + eps, hi - eps] so both stay finite.
class ActivationPair {
public:
    static constexpr double default_epsilon = 1e-7;

    /// f(x) = ln(x / (1 - x)) on (0, 1), phi(y) = 1 / (1 + e^-y).
    static ActivationPair logit_sigmoid(double epsilon = default_epsilon);

    /// Looks up a pair by its registered name ("logit-sigmoid").
    static ActivationPair by_name(const std::string& name, double epsilon = default_epsilon);

    const std::string& name() const noexcept { return name_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double epsilon() const noexcept { return eps_; }

    double clamp(double x) const noexcept;

    double f(double x) const noexcept { return f_(clamp(x)); }
    double phi(double y) const noexcept { return clamp(phi_(y)); }

    /// df/dx of the clamped map: f'(x) inside [lo + eps, hi - eps], zero outside.
    double f_derivative(double x) const noexcept;

    Matrix apply_f(const Matrix& m) const;
    Matrix apply_phi(const Matrix& m) const;

private:
    using Fn = double (*)(double);

    ActivationPair(std::string name, double lo, double hi, double eps, Fn f, Fn phi, Fn df);

    std::string name_;
    double lo_;
    double hi_;
    double eps_;
    Fn f_;
    Fn phi_;
    Fn df_;
};

} // namespace karnet
