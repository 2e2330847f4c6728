#pragma once

#include "karnet/linalg.hpp"

#include <cstddef>
#include <vector>

namespace karnet {

/// Row-wise argmax; ties go to the lowest column index.
std::vector<std::size_t> classify(const Matrix& outputs);

/// Rows whose predicted class differs from the target's. For q >= 2 both
/// sides are decoded by argmax; for q == 1 both are thresholded at 0.5.
std::size_t classification_errors(const Matrix& outputs, const Matrix& targets);

/// Fraction of `predicted` equal to `labels`.
double accuracy(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& labels);

} // namespace karnet
