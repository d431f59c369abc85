#include "dvae/latent_tools.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dvae/config_file.hpp"
#include "dvae/descriptive_decoder.hpp"
#include "dvae/errors.hpp"

namespace dvae {

Maneuver classify(const LatentParams& lp, const ClassifierThresholds& th) {
    if (lp.stretch < th.t_mu || std::fabs(lp.lambda) < th.t_lambda) return Maneuver::KL;
    if (lp.lambda > th.t_lambda) return Maneuver::LL;
    return Maneuver::LR;
}

WatchdogVerdict validate(const LatentParams& lp, const WatchdogRuleSet& rules) {
    WatchdogVerdict v;
    if (!(std::fabs(lp.lambda) < rules.lambda_abs_max))
        v.violated.push_back("lambda_abs_max");
    if (lp.stretch < rules.stretch_min || lp.stretch > rules.stretch_max)
        v.violated.push_back("stretch_range");
    if (lp.a_x < rules.ax_min || lp.a_x > rules.ax_max)
        v.violated.push_back("ax_range");
    v.accepted = v.violated.empty();
    return v;
}

ClassifierThresholds thresholds_from_config(const ConfigMap& cfg) {
    ClassifierThresholds th;
    th.t_lambda = cfg.get_double_or("t_lambda", th.t_lambda);
    th.t_mu = cfg.get_double_or("t_mu", th.t_mu);
    if (th.t_lambda <= 0.0 || th.t_mu <= 0.0)
        throw ConfigError("classifier thresholds must be positive");
    return th;
}

WatchdogRuleSet rules_from_config(const ConfigMap& cfg) {
    WatchdogRuleSet r;
    r.lambda_abs_max = cfg.get_double_or("lambda_abs_max", r.lambda_abs_max);
    r.stretch_min = cfg.get_double_or("stretch_min", r.stretch_min);
    r.stretch_max = cfg.get_double_or("stretch_max", r.stretch_max);
    r.ax_min = cfg.get_double_or("ax_min", r.ax_min);
    r.ax_max = cfg.get_double_or("ax_max", r.ax_max);
    if (r.stretch_min > r.stretch_max || r.ax_min > r.ax_max)
        throw ConfigError("watchdog rule ranges must be nonempty");
    return r;
}

namespace {

constexpr double kLambdaGridMin = -10.0;
constexpr double kLambdaGridMax = 10.0;
constexpr double kLogMuGridMin = -4.0;
constexpr double kLogMuGridMax = 2.0;
constexpr double kGridStep = 0.25;
constexpr std::size_t kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;

// Sigmoid basis with the anchor subtracted, b_i = s(mu*tau_i) - s(mu*tau_0).
void lateral_basis(double mu, const TimeGrid& grid, std::vector<double>& b) {
    const double s0 = logistic(mu * grid.tau0());
    b.resize(grid.pred_steps);
    for (std::size_t i = 1; i <= grid.pred_steps; ++i)
        b[i - 1] = logistic(mu * grid.tau(i)) - s0;
}

double lateral_sse(double lambda, double mu, const TimeGrid& grid,
                   const std::vector<double>& y, std::vector<double>& scratch) {
    lateral_basis(mu, grid, scratch);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = lambda * scratch[i] - y[i];
        acc += r * r;
    }
    return acc;
}

}  // namespace

FitResult fit_reference_params(const Mat& target_future, double v0x, const TimeGrid& grid) {
    const std::size_t P = grid.pred_steps;
    if (target_future.rows != P || target_future.cols != 2)
        throw UsageError("fit: target trajectory shape does not match the grid");
    if (P < 3) throw UsageError("fit: need at least 3 prediction points");

    FitResult out;

    // Longitudinal: single-parameter least squares on the constant
    // acceleration model.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i <= P; ++i) {
        const double t = grid.t(i);
        const double basis = 0.5 * t * t;
        num += basis * (target_future(i - 1, 0) - v0x * t);
        den += basis * basis;
    }
    out.a_x = num / den;
    double long_sse = 0.0;
    for (std::size_t i = 1; i <= P; ++i) {
        const double t = grid.t(i);
        const double r = v0x * t + 0.5 * out.a_x * t * t - target_future(i - 1, 0);
        long_sse += r * r;
    }
    out.longitudinal_rmse = std::sqrt(long_sse / static_cast<double>(P));

    std::vector<double> y(P);
    double max_abs_y = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
        y[i] = target_future(i, 1);
        max_abs_y = std::max(max_abs_y, std::fabs(y[i]));
    }
    if (max_abs_y == 0.0) {
        out.lambda = 0.0;
        out.mu = std::exp(kLogMuGridMin);
        out.degenerate = true;
        out.lateral_rmse = 0.0;
        return out;
    }

    // Coarse grid over (lambda, ln mu). For each mu the SSE is quadratic in
    // lambda, so two dot products cover the whole lambda axis.
    double best_sse = std::numeric_limits<double>::infinity();
    double best_lambda = 0.0, best_logmu = kLogMuGridMin;
    double best_profiled_lambda = 0.0;
    double prof_sse = std::numeric_limits<double>::infinity();
    double prof_logmu = kLogMuGridMin, prof_lambda = 0.0;
    std::vector<double> basis;
    for (double logmu = kLogMuGridMin; logmu <= kLogMuGridMax + 1e-12; logmu += kGridStep) {
        lateral_basis(std::exp(logmu), grid, basis);
        double bb = 0.0, by = 0.0, yy = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
            bb += basis[i] * basis[i];
            by += basis[i] * y[i];
            yy += y[i] * y[i];
        }
        if (bb > 0.0 && yy - by * by / bb < prof_sse) {
            prof_sse = yy - by * by / bb;
            prof_logmu = logmu;
            prof_lambda = by / bb;
        }
        for (double lambda = kLambdaGridMin; lambda <= kLambdaGridMax + 1e-12;
             lambda += kGridStep) {
            const double sse = lambda * lambda * bb - 2.0 * lambda * by + yy;
            if (sse < best_sse) {
                best_sse = sse;
                best_lambda = lambda;
                best_logmu = logmu;
                best_profiled_lambda = bb > 0.0 ? by / bb : lambda;
            }
        }
    }
    (void)best_lambda;

    // Refinement starts from the closed-form lambda at the winning stretch
    // (the model is linear in lambda), which puts the iterate on the valley
    // floor of the lane-keep regime where lambda and mu are nearly
    // product-coupled.
    double lambda = best_profiled_lambda;
    double logmu = best_logmu;
    if (lambda == 0.0) {
        double ysum = 0.0;
        for (double v : y) ysum += v;
        lambda = (ysum >= 0.0 ? 1.0 : -1.0) * 0.5 * kGridStep;
    }

    // Damped Gauss-Newton on (lambda, z3 = ln mu) with the decoder's
    // closed-form Jacobian. The damping rejects the huge steps the plain
    // normal equations produce along the nearly singular product valley.
    std::vector<double> scratch;
    double sse = lateral_sse(lambda, std::exp(logmu), grid, y, scratch);
    double damp = 0.0;
    std::size_t iter = 0;
    for (; iter < kMaxIterations; ++iter) {
        const std::array<double, kLatentDim> z{0.0, lambda, logmu};
        const DecoderJacobian jac = decoder_gradients(z, grid);
        lateral_basis(std::exp(logmu), grid, basis);

        double j11 = 0.0, j12 = 0.0, j22 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
            const double r = lambda * basis[i] - y[i];
            const double ji1 = jac.dy_dz2[i];
            const double ji2 = jac.dy_dz3[i];
            j11 += ji1 * ji1;
            j12 += ji1 * ji2;
            j22 += ji2 * ji2;
            g1 += ji1 * r;
            g2 += ji2 * r;
        }

        double d_lambda = 0.0, d_logmu = 0.0, next_sse = sse;
        bool accepted = false;
        for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
            const double a11 = j11 + damp * (j11 + 1e-300);
            const double a22 = j22 + damp * (j22 + 1e-300);
            const double det = a11 * a22 - j12 * j12;
            if (det > 0.0 && std::isfinite(det)) {
                d_lambda = -(a22 * g1 - j12 * g2) / det;
                d_logmu = -(-j12 * g1 + a11 * g2) / det;
                const double trial = lateral_sse(lambda + d_lambda,
                                                 std::exp(logmu + d_logmu), grid, y, scratch);
                if (std::isfinite(trial) && trial <= sse) {
                    next_sse = trial;
                    accepted = true;
                    damp = damp > 1e-12 ? damp / 4.0 : 0.0;
                    break;
                }
            }
            damp = damp == 0.0 ? 1e-8 : damp * 8.0;
        }
        if (!accepted) break;

        lambda += d_lambda;
        logmu += d_logmu;
        sse = next_sse;
        if (std::hypot(d_lambda, d_logmu) < kStepTolerance) break;
    }

    // Valley polish: the model is linear in lambda, so the least-squares
    // lambda is closed-form per stretch. A golden-section pass on the
    // profiled 1-D objective finishes the nearly product-coupled lane-keep
    // tracks that leave the damped steps crawling.
    {
        if (prof_sse < sse) {
            logmu = prof_logmu;
            lambda = prof_lambda;
            sse = lateral_sse(lambda, std::exp(logmu), grid, y, scratch);
        }
        auto profiled = [&](double lm) {
            lateral_basis(std::exp(lm), grid, basis);
            double bb = 0.0, by = 0.0, yy = 0.0;
            for (std::size_t i = 0; i < P; ++i) {
                bb += basis[i] * basis[i];
                by += basis[i] * y[i];
                yy += y[i] * y[i];
            }
            const double lam = bb > 0.0 ? by / bb : 0.0;
            return std::pair<double, double>(yy - lam * by - lam * (by - lam * bb), lam);
        };
        const double golden = 0.6180339887498949;
        double lo = logmu - 0.5, hi = logmu + 0.5;
        double m1 = hi - golden * (hi - lo);
        double m2 = lo + golden * (hi - lo);
        double f1 = profiled(m1).first;
        double f2 = profiled(m2).first;
        for (int k = 0; k < 120 && hi - lo > 1e-14; ++k) {
            if (f1 <= f2) {
                hi = m2;
                m2 = m1;
                f2 = f1;
                m1 = hi - golden * (hi - lo);
                f1 = profiled(m1).first;
            } else {
                lo = m1;
                m1 = m2;
                f1 = f2;
                m2 = lo + golden * (hi - lo);
                f2 = profiled(m2).first;
            }
        }
        const double lm_best = 0.5 * (lo + hi);
        const auto [polished_sse, polished_lambda] = profiled(lm_best);
        const double check =
            lateral_sse(polished_lambda, std::exp(lm_best), grid, y, scratch);
        if (check <= sse) {
            logmu = lm_best;
            lambda = polished_lambda;
            sse = check;
        }
    }

    out.lambda = lambda;
    out.mu = std::exp(logmu);
    out.lateral_rmse = std::sqrt(sse / static_cast<double>(P));
    out.iterations = iter;
    return out;
}

Histogram make_histogram(const std::vector<double>& values, std::size_t bins) {
    if (values.empty()) throw UsageError("no samples");
    if (bins == 0) throw UsageError("histogram needs at least one bin");
    Histogram h;
    h.lo = *std::min_element(values.begin(), values.end());
    h.hi = *std::max_element(values.begin(), values.end());
    if (h.hi <= h.lo) h.hi = h.lo + 1.0;
    h.counts.assign(bins, 0);
    for (double v : values) {
        std::size_t k = static_cast<std::size_t>(
            (v - h.lo) / (h.hi - h.lo) * static_cast<double>(bins));
        if (k >= bins) k = bins - 1;
        ++h.counts[k];
    }
    return h;
}

ReferenceDistributions reference_histogram(const Dataset& ds, std::size_t bins) {
    if (ds.size() == 0) throw UsageError("no samples");
    ReferenceDistributions out;
    std::vector<double> lambdas, mus, axs;
    lambdas.reserve(ds.size());
    mus.reserve(ds.size());
    axs.reserve(ds.size());
    for (const Scenario& s : ds.scenarios) {
        const FitResult fit = fit_reference_params(s.target_future, s.last_vx(), ds.grid);
        lambdas.push_back(fit.lambda);
        mus.push_back(fit.mu);
        axs.push_back(fit.a_x);
        out.fits.push_back(fit);
    }
    out.lambda = make_histogram(lambdas, bins);
    out.mu = make_histogram(mus, bins);
    out.a_x = make_histogram(axs, bins);
    return out;
}

}  // namespace dvae
