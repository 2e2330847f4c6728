#pragma once

#include "karnet/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace karnet {

/// Per-column affine map from a training (min, max) range onto [eps, 1 - eps].
struct MinMaxScaling {
    std::vector<double> min;
    std::vector<double> max;
    double epsilon = 0.05;

    /// Scales `x` with these parameters, clamping into [eps, 1 - eps].
    Matrix apply(const Matrix& x) const;

    bool operator==(const MinMaxScaling&) const = default;
};

struct Dataset {
    Matrix x;                          // m x d features
    Matrix y;                          // m x q targets
    std::vector<std::size_t> labels;   // empty for unlabelled data
    std::vector<std::string> class_names;
    std::vector<std::string> header;   // as read, label column included; empty if none
    std::size_t label_column = 0;      // position of the label within a CSV row
    std::optional<MinMaxScaling> scaling;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(x.rows()); }
    std::size_t features() const noexcept { return static_cast<std::size_t>(x.cols()); }
    /// Number of classes, 0 for regression data.
    std::size_t class_count() const noexcept { return class_names.size(); }
};

/// Stratified assignment of samples to k folds.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignment; // fold index per sample
    std::uint64_t seed = 0;

    std::vector<std::size_t> test_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Reads a numeric CSV whose `label_column` holds class names; labels are
/// numbered in order of first appearance. A negative column counts from the
/// end (-1 is the last column). Targets are one-vs-all encoded with 0/1.
Dataset load_csv(const std::string& path, int label_column, bool has_header);

/// As load_csv, reading from a stream; `source` names it in error messages.
Dataset parse_csv(std::istream& in, int label_column, bool has_header,
                  const std::string& source = "<stream>");

/// Writes `ds` back in canonical CSV form (shortest round-trip numbers, the
/// label in its original column, the header when one was read).
void write_csv(const Dataset& ds, std::ostream& out);

/// Fits min-max scaling on `ds.x` and returns the scaled copy.
Dataset scale_minmax(const Dataset& ds, double epsilon);

/// Applies already-fitted scaling (e.g. training-fold statistics to a test fold).
Dataset apply_scaling(const Dataset& ds, const MinMaxScaling& scaling);

/// m x q matrix holding `high` in each label's column and `low` elsewhere.
Matrix encode_one_vs_all(const std::vector<std::size_t>& labels, std::size_t q,
                         double low = 0.0, double high = 1.0);

/// Shuffles each class with a seeded generator, then deals all samples to
/// folds round-robin, continuing the rotation from one class to the next.
FoldPlan stratified_folds(const std::vector<std::size_t>& labels, std::size_t k, std::uint64_t seed);

/// Four XOR points with targets {0, 0, 1, 1}; the perturbed set avoids the
/// exact symmetry of the unit-square corners.
Dataset make_xor(bool perturbed);

/// The 150-sample, 3-class iris data set, bundled with the library.
Dataset iris_dataset();

/// Rows of `ds` at `indices`, in that order.
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

/// The first `per_class` samples of each class (file order) and the rest.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_first_per_class(const Dataset& ds, std::size_t per_class);

} // namespace karnet
