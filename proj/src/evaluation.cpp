#include "dvae/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dvae/errors.hpp"

namespace dvae {

ErrorMode error_mode_from_string(const std::string& s) {
    if (s == "final") return ErrorMode::final_step;
    if (s == "mean") return ErrorMode::mean;
    if (s == "max") return ErrorMode::max;
    throw UsageError("unknown error mode: " + s + " (expected final|mean|max)");
}

const char* to_string(ErrorMode mode) {
    switch (mode) {
        case ErrorMode::final_step: return "final";
        case ErrorMode::mean: return "mean";
        case ErrorMode::max: return "max";
    }
    return "?";
}

namespace {

double reduce_abs_errors(const std::vector<double>& pred, const Mat& target,
                         std::size_t column, ErrorMode mode) {
    const std::size_t P = target.rows;
    if (pred.size() != P || target.cols != 2)
        throw UsageError("error reduction: prediction/target shape mismatch");
    if (P == 0) throw UsageError("error reduction: empty trajectory");
    switch (mode) {
        case ErrorMode::final_step:
            return std::fabs(pred[P - 1] - target(P - 1, column));
        case ErrorMode::mean: {
            double acc = 0.0;
            for (std::size_t i = 0; i < P; ++i)
                acc += std::fabs(pred[i] - target(i, column));
            return acc / static_cast<double>(P);
        }
        case ErrorMode::max: {
            double m = 0.0;
            for (std::size_t i = 0; i < P; ++i)
                m = std::max(m, std::fabs(pred[i] - target(i, column)));
            return m;
        }
    }
    return 0.0;
}

}  // namespace

double lateral_error(const Trajectory& pred, const Mat& target, ErrorMode mode) {
    return reduce_abs_errors(pred.ys, target, 1, mode);
}

double longitudinal_error(const Trajectory& pred, const Mat& target, ErrorMode mode) {
    return reduce_abs_errors(pred.xs, target, 0, mode);
}

EcdfCurve::EcdfCurve(std::vector<double> errors) : values_(std::move(errors)) {
    if (values_.empty()) throw UsageError("ecdf needs at least one sample");
    for (double v : values_)
        if (!std::isfinite(v) || v < 0.0)
            throw UsageError("ecdf values must be finite and nonnegative");
    std::sort(values_.begin(), values_.end());
}

double EcdfCurve::query(double e) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), e);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EcdfCurve::percentile(double q) const {
    if (!(q > 0.0) || q > 1.0) throw UsageError("percentile fraction must be in (0, 1]");
    const double n = static_cast<double>(values_.size());
    // Smallest k with k/n >= q, robust to the floating product landing a
    // hair above an integer.
    std::size_t k = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    if (k < 1) k = 1;
    while (static_cast<double>(k) / n < q && k < values_.size()) ++k;
    return values_[k - 1];
}

std::array<std::array<double, 3>, 3> ConfusionMatrix::rates() const {
    std::array<std::array<double, 3>, 3> r{};
    for (std::size_t row = 0; row < 3; ++row) {
        std::size_t row_total = 0;
        for (std::size_t col = 0; col < 3; ++col) row_total += counts[row][col];
        for (std::size_t col = 0; col < 3; ++col)
            r[row][col] = row_total == 0
                              ? 0.0
                              : static_cast<double>(counts[row][col]) /
                                    static_cast<double>(row_total);
    }
    return r;
}

double ConfusionMatrix::macro_accuracy() const {
    const auto r = rates();
    double acc = 0.0;
    std::size_t rows_with_samples = 0;
    for (std::size_t row = 0; row < 3; ++row) {
        std::size_t row_total = 0;
        for (std::size_t col = 0; col < 3; ++col) row_total += counts[row][col];
        if (row_total == 0) continue;
        acc += r[row][row];
        ++rows_with_samples;
    }
    return rows_with_samples == 0 ? 0.0 : acc / static_cast<double>(rows_with_samples);
}

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
        for (std::size_t c : row) n += c;
    return n;
}

ConfusionMatrix confusion(const std::vector<Maneuver>& target,
                          const std::vector<Maneuver>& predicted) {
    if (target.size() != predicted.size() || target.empty())
        throw UsageError("confusion: label lists must be nonempty and equal length");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < target.size(); ++i)
        ++m.counts[static_cast<std::size_t>(target[i])][static_cast<std::size_t>(predicted[i])];
    return m;
}

LambdaErrorStats lambda_error_stats(const std::vector<double>& predicted,
                                    const std::vector<double>& reference) {
    if (predicted.size() != reference.size() || predicted.empty())
        throw UsageError("lambda stats: value lists must be nonempty and equal length");
    const double n = static_cast<double>(predicted.size());
    LambdaErrorStats st;
    st.min_abs = std::numeric_limits<double>::infinity();
    double sum_abs = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double signed_err = predicted[i] - reference[i];
        const double abs_err = std::fabs(signed_err);
        st.bias += signed_err;
        sum_abs += abs_err;
        st.min_abs = std::min(st.min_abs, abs_err);
        st.max_abs = std::max(st.max_abs, abs_err);
    }
    st.bias /= n;
    st.mean_abs = sum_abs / n;
    double var = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = std::fabs(predicted[i] - reference[i]) - st.mean_abs;
        var += d * d;
    }
    st.std_abs = std::sqrt(var / n);
    return st;
}

}  // namespace dvae
