#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "dvae/mat.hpp"
#include "dvae/types.hpp"

namespace dvae {

enum class ErrorMode { final_step, mean, max };

ErrorMode error_mode_from_string(const std::string& s);
const char* to_string(ErrorMode mode);

// Absolute lateral deviation |y_hat - y| reduced over the prediction steps
// per the mode (final step by default).
double lateral_error(const Trajectory& pred, const Mat& target, ErrorMode mode);

// Longitudinal counterpart, available behind the same interface.
double longitudinal_error(const Trajectory& pred, const Mat& target, ErrorMode mode);

// Empirical cumulative distribution of nonnegative error values.
class EcdfCurve {
public:
    explicit EcdfCurve(std::vector<double> errors);

    // Fraction of samples <= e; right-continuous step function.
    double query(double e) const;

    // Smallest sample value v with query(v) >= q (lower quantile).
    double percentile(double q) const;

    const std::vector<double>& sorted_values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

// 3x3 confusion counts, rows = target maneuver, columns = predicted, in
// class order LL, KL, LR.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 3>, 3> counts{};

    std::array<std::array<double, 3>, 3> rates() const;  // row-normalized
    // Mean of the diagonal rates over rows that have samples.
    double macro_accuracy() const;
    std::size_t total() const;
};

ConfusionMatrix confusion(const std::vector<Maneuver>& target,
                          const std::vector<Maneuver>& predicted);

struct LambdaErrorStats {
    double bias = 0.0;      // mean of signed (pred - ref)
    double mean_abs = 0.0;  // statistics of |pred - ref|
    double std_abs = 0.0;
    double min_abs = 0.0;
    double max_abs = 0.0;
};

LambdaErrorStats lambda_error_stats(const std::vector<double>& predicted,
                                    const std::vector<double>& reference);

}  // namespace dvae
