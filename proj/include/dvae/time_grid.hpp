#pragma once

#include <cmath>
#include <cstddef>

#include "dvae/errors.hpp"

namespace dvae {

// Shared discretization of the observation and prediction windows.
// Prediction timestamps are t_i = i*dt for i = 1..pred_steps, so exactly
// pred_steps points cover (0, t_pred]. The sigmoid evaluation positions are
// the zero-centred tau_i = t_i - 0.5*t_pred with anchor tau_0 = -0.5*t_pred
// (the anchor corresponds to t = 0 and is not an emitted prediction point).
struct TimeGrid {
    double dt = 0.04;
    double t_obs = 3.0;
    double t_pred = 5.0;
    std::size_t obs_steps = 75;
    std::size_t pred_steps = 125;

    static TimeGrid from_durations(double dt, double t_obs, double t_pred) {
        if (dt <= 0.0 || t_obs <= 0.0 || t_pred <= 0.0)
            throw ConfigError("time grid durations must be positive");
        TimeGrid g;
        g.dt = dt;
        g.t_obs = t_obs;
        g.t_pred = t_pred;
        g.obs_steps = static_cast<std::size_t>(std::llround(t_obs / dt));
        g.pred_steps = static_cast<std::size_t>(std::llround(t_pred / dt));
        if (g.obs_steps == 0 || g.pred_steps == 0 ||
            std::fabs(static_cast<double>(g.obs_steps) * dt - t_obs) > 1e-9 ||
            std::fabs(static_cast<double>(g.pred_steps) * dt - t_pred) > 1e-9)
            throw ConfigError("time grid durations are not multiples of dt");
        return g;
    }

    static TimeGrid from_counts(std::size_t obs_steps, std::size_t pred_steps, double dt) {
        if (dt <= 0.0 || obs_steps == 0 || pred_steps == 0)
            throw ConfigError("time grid counts must be positive");
        TimeGrid g;
        g.dt = dt;
        g.obs_steps = obs_steps;
        g.pred_steps = pred_steps;
        g.t_obs = static_cast<double>(obs_steps) * dt;
        g.t_pred = static_cast<double>(pred_steps) * dt;
        return g;
    }

    // Prediction timestamp, i in 1..pred_steps.
    double t(std::size_t i) const { return static_cast<double>(i) * dt; }

    double tau(std::size_t i) const { return t(i) - 0.5 * t_pred; }
    double tau0() const { return -0.5 * t_pred; }

    // Observation timestamp, k in 1..obs_steps; the last one is t = 0.
    double obs_time(std::size_t k) const {
        return (static_cast<double>(k) - static_cast<double>(obs_steps)) * dt;
    }

    bool matches(const TimeGrid& o, double tol = 1e-9) const {
        return obs_steps == o.obs_steps && pred_steps == o.pred_steps &&
               std::fabs(dt - o.dt) <= tol;
    }
};

}  // namespace dvae
