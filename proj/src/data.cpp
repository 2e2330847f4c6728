#include "karnet/data.hpp"

#include "karnet/errors.hpp"
#include "iris_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace karnet {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan";
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string location(const std::string& source, std::size_t row, std::size_t col = 0) {
    std::string s = source + ":" + std::to_string(row);
    if (col)
        s += ": column " + std::to_string(col);
    return s;
}

} // namespace

Matrix MinMaxScaling::apply(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != min.size())
        throw DimensionError("scaling: fitted on " + std::to_string(min.size()) + " columns, got "
                             + shape_of(x));
    Matrix out(x.rows(), x.cols());
    const double lo = epsilon;
    const double hi = 1.0 - epsilon;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double range = max[j] - min[j];
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (range <= 0.0) {
                out(i, j) = 0.5;
                continue;
            }
            const double t = (x(i, j) - min[j]) / range;
            out(i, j) = std::clamp(lo + t * (hi - lo), lo, hi);
        }
    }
    return out;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == fold)
            out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != fold)
            out.push_back(i);
    return out;
}

Dataset parse_csv(std::istream& in, int label_column, bool has_header, const std::string& source) {
    Dataset ds;
    std::vector<std::vector<double>> rows;
    std::map<std::string, std::size_t> class_index;
    std::size_t width = 0;
    std::size_t label_pos = 0;

    std::string line;
    std::size_t line_no = 0;
    bool header_pending = has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        std::vector<std::string> fields = split_fields(line);
        if (width == 0) {
            width = fields.size();
            const long pos = label_column < 0 ? static_cast<long>(width) + label_column : label_column;
            if (pos < 0 || pos >= static_cast<long>(width) || width < 2)
                throw DataError(DataError::Kind::bad_label,
                                location(source, line_no) + ": label column "
                                    + std::to_string(label_column) + " is outside a row of "
                                    + std::to_string(width) + " fields",
                                line_no);
            label_pos = static_cast<std::size_t>(pos);
        } else if (fields.size() != width) {
            throw DataError(DataError::Kind::ragged_row,
                            location(source, line_no) + ": expected " + std::to_string(width)
                                + " fields, found " + std::to_string(fields.size()),
                            line_no);
        }
        if (header_pending) {
            ds.header = fields;
            header_pending = false;
            continue;
        }

        std::vector<double> values;
        values.reserve(width - 1);
        for (std::size_t c = 0; c < width; ++c) {
            const std::string& cell = fields[c];
            if (c == label_pos) {
                if (cell.empty())
                    throw DataError(DataError::Kind::missing_value,
                                    location(source, line_no, c + 1) + ": missing label", line_no, c + 1);
                auto [it, inserted] = class_index.try_emplace(cell, ds.class_names.size());
                if (inserted)
                    ds.class_names.push_back(cell);
                ds.labels.push_back(it->second);
                continue;
            }
            if (is_missing(cell))
                throw DataError(DataError::Kind::missing_value,
                                location(source, line_no, c + 1) + ": missing feature value", line_no, c + 1);
            double v = 0.0;
            const char* begin = cell.data();
            const char* end = begin + cell.size();
            const auto res = std::from_chars(begin, end, v);
            if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
                throw DataError(DataError::Kind::non_numeric,
                                location(source, line_no, c + 1) + ": '" + cell + "' is not a number",
                                line_no, c + 1);
            values.push_back(v);
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty())
        throw DataError(DataError::Kind::empty_file, source + ": no data rows");

    ds.label_column = label_pos;
    ds.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j + 1 < width; ++j)
            ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    ds.y = encode_one_vs_all(ds.labels, ds.class_names.size());
    return ds;
}

Dataset load_csv(const std::string& path, int label_column, bool has_header) {
    std::ifstream in(path);
    if (!in)
        throw DataError(DataError::Kind::missing_file, path + ": cannot open file");
    return parse_csv(in, label_column, has_header, path);
}

void write_csv(const Dataset& ds, std::ostream& out) {
    const bool labelled = !ds.labels.empty();
    auto write_row = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i)
            out << (i ? "," : "") << fields[i];
        out << '\n';
    };
    if (!ds.header.empty())
        write_row(ds.header);
    for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
        std::vector<std::string> fields;
        for (Eigen::Index j = 0; j < ds.x.cols(); ++j)
            fields.push_back(format_number(ds.x(i, j)));
        if (labelled) {
            const auto pos = std::min(ds.label_column, fields.size());
            fields.insert(fields.begin() + static_cast<std::ptrdiff_t>(pos),
                          ds.class_names.at(ds.labels[static_cast<std::size_t>(i)]));
        }
        write_row(fields);
    }
}

Dataset scale_minmax(const Dataset& ds, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw ConfigError("scale_minmax: epsilon must lie in (0, 0.5)");
    MinMaxScaling s;
    s.epsilon = epsilon;
    for (Eigen::Index j = 0; j < ds.x.cols(); ++j) {
        s.min.push_back(ds.x.col(j).minCoeff());
        s.max.push_back(ds.x.col(j).maxCoeff());
    }
    return apply_scaling(ds, s);
}

Dataset apply_scaling(const Dataset& ds, const MinMaxScaling& scaling) {
    Dataset out = ds;
    out.x = scaling.apply(ds.x);
    out.scaling = scaling;
    return out;
}

Matrix encode_one_vs_all(const std::vector<std::size_t>& labels, std::size_t q, double low, double high) {
    Matrix y = Matrix::Constant(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(q), low);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= q)
            throw DataError(DataError::Kind::bad_label,
                            "one-vs-all: label " + std::to_string(labels[i]) + " at row "
                                + std::to_string(i) + " is not below q = " + std::to_string(q),
                            i + 1);
        y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(labels[i])) = high;
    }
    return y;
}

FoldPlan stratified_folds(const std::vector<std::size_t>& labels, std::size_t k, std::uint64_t seed) {
    if (k < 2)
        throw ConfigError("stratified_folds: k must be >= 2");
    if (k > labels.size())
        throw ConfigError("stratified_folds: k = " + std::to_string(k) + " exceeds the "
                          + std::to_string(labels.size()) + " samples");

    std::map<std::size_t, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[labels[i]].push_back(i);

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignment.assign(labels.size(), 0);

    std::mt19937_64 rng(seed);
    std::size_t next = 0;
    for (auto& [label, members] : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t idx : members)
            plan.assignment[idx] = next++ % k;
    }
    return plan;
}

Dataset make_xor(bool perturbed) {
    Dataset ds;
    ds.x.resize(4, 2);
    if (perturbed)
        ds.x << 0.0, 0.0, 0.9991, 0.9991, 0.9990, 0.0, 0.0, 0.9990;
    else
        ds.x << 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0;
    ds.y.resize(4, 1);
    ds.y << 0.0, 0.0, 1.0, 1.0;
    ds.labels = {0, 0, 1, 1};
    ds.class_names = {"0", "1"};
    ds.label_column = 2;
    return ds;
}

Dataset iris_dataset() {
    std::istringstream in(detail::iris_csv);
    return parse_csv(in, -1, true, "builtin:iris");
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.class_names = ds.class_names;
    out.header = ds.header;
    out.label_column = ds.label_column;
    out.scaling = ds.scaling;
    out.x.resize(static_cast<Eigen::Index>(indices.size()), ds.x.cols());
    out.y.resize(static_cast<Eigen::Index>(indices.size()), ds.y.cols());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(indices[r]);
        if (src >= ds.x.rows())
            throw DimensionError("subset: row " + std::to_string(indices[r]) + " out of range");
        out.x.row(static_cast<Eigen::Index>(r)) = ds.x.row(src);
        out.y.row(static_cast<Eigen::Index>(r)) = ds.y.row(src);
        if (!ds.labels.empty())
            out.labels.push_back(ds.labels[indices[r]]);
    }
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_first_per_class(const Dataset& ds, std::size_t per_class) {
    std::vector<std::size_t> seen(ds.class_count(), 0);
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
        if (seen[ds.labels[i]]++ < per_class)
            train.push_back(i);
        else
            test.push_back(i);
    }
    return {std::move(train), std::move(test)};
}

} // namespace karnet
