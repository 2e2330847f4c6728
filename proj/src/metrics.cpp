#include "karnet/metrics.hpp"

#include "karnet/errors.hpp"

namespace karnet {

std::vector<std::size_t> classify(const Matrix& outputs) {
    std::vector<std::size_t> out(static_cast<std::size_t>(outputs.rows()));
    for (Eigen::Index i = 0; i < outputs.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index j = 1; j < outputs.cols(); ++j)
            if (outputs(i, j) > outputs(i, best))
                best = j;
        out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
    }
    return out;
}

std::size_t classification_errors(const Matrix& outputs, const Matrix& targets) {
    if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
        throw DimensionError("classification_errors: " + shape_of(outputs) + " vs " + shape_of(targets));
    std::size_t errors = 0;
    if (outputs.cols() == 1) {
        for (Eigen::Index i = 0; i < outputs.rows(); ++i)
            errors += (outputs(i, 0) >= 0.5) != (targets(i, 0) >= 0.5);
        return errors;
    }
    const auto predicted = classify(outputs);
    const auto expected = classify(targets);
    for (std::size_t i = 0; i < predicted.size(); ++i)
        errors += predicted[i] != expected[i];
    return errors;
}

double accuracy(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& labels) {
    if (predicted.size() != labels.size())
        throw DimensionError("accuracy: " + std::to_string(predicted.size()) + " predictions for "
                             + std::to_string(labels.size()) + " labels");
    if (labels.empty())
        return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        hits += predicted[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

} // namespace karnet
