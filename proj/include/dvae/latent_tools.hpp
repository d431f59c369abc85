#pragma once

#include <string>
#include <vector>

#include "dvae/scenario.hpp"
#include "dvae/time_grid.hpp"
#include "dvae/types.hpp"

namespace dvae {

// Threshold classifier over the interpretable latent parameters:
//   IF (mu < t_mu) OR (abs(lambda) < t_lambda)  -> KL
//   ELSE IF (lambda > t_lambda)                 -> LL
//   ELSE                                        -> LR
struct ClassifierThresholds {
    double t_lambda = 0.85;
    double t_mu = 0.25;
};

Maneuver classify(const LatentParams& lp, const ClassifierThresholds& th);

// Rule-based validation of a latent sample. Only the lambda bound comes
// from observed driving ranges; the stretch and acceleration windows are
// configurable plausibility defaults.
struct WatchdogRuleSet {
    double lambda_abs_max = 8.0;
    double stretch_min = 1e-4;
    double stretch_max = 10.0;
    double ax_min = -5.0;
    double ax_max = 5.0;
};

struct WatchdogVerdict {
    bool accepted = true;
    std::vector<std::string> violated;  // rule names, empty when accepted
};

WatchdogVerdict validate(const LatentParams& lp, const WatchdogRuleSet& rules);

ClassifierThresholds thresholds_from_config(const class ConfigMap& cfg);
WatchdogRuleSet rules_from_config(const class ConfigMap& cfg);

// Non-causal least-squares parameterization of a ground-truth future
// trajectory. Usable for reference distributions and threshold tuning only;
// it reads the future and therefore never participates in prediction.
struct FitResult {
    double a_x = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double lateral_rmse = 0.0;
    double longitudinal_rmse = 0.0;
    bool degenerate = false;  // all-zero lateral track
    std::size_t iterations = 0;
};

// a_x by closed-form least squares on the constant-acceleration residuals;
// (lambda, mu) by a coarse grid (lambda in [-10,10] step 0.25, ln mu in
// [-4,2] step 0.25) followed by Gauss-Newton refinement on (lambda, ln mu),
// converged when the step norm drops below 1e-10 or after 200 iterations.
FitResult fit_reference_params(const Mat& target_future, double v0x, const TimeGrid& grid);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;

    double edge(std::size_t k) const {
        return lo + (hi - lo) * static_cast<double>(k) /
                        static_cast<double>(counts.size());
    }
};

Histogram make_histogram(const std::vector<double>& values, std::size_t bins);

// Fits every scenario and histograms the recovered parameters; the raw fits
// are returned alongside for threshold tuning.
struct ReferenceDistributions {
    Histogram lambda;
    Histogram mu;
    Histogram a_x;
    std::vector<FitResult> fits;
};

ReferenceDistributions reference_histogram(const Dataset& ds, std::size_t bins);

}  // namespace dvae
