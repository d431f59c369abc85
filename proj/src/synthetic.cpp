#include "dvae/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "dvae/descriptive_decoder.hpp"
#include "dvae/errors.hpp"
#include "dvae/rng.hpp"

namespace dvae {

namespace {

// Lateral position of the generated curve at an arbitrary time, anchored so
// y(0) = 0; valid before and after t_0.
double lateral_at(double t, double lambda, double mu, const TimeGrid& grid) {
    const double tau = t - 0.5 * grid.t_pred;
    return lambda * (logistic(mu * tau) - logistic(mu * grid.tau0()));
}

double lateral_velocity_at(double t, double lambda, double mu, const TimeGrid& grid) {
    const double tau = t - 0.5 * grid.t_pred;
    const double s = logistic(mu * tau);
    return lambda * mu * s * (1.0 - s);
}

std::vector<Maneuver> allocate_labels(const GeneratorConfig& cfg) {
    const std::array<Maneuver, 3> classes{Maneuver::LL, Maneuver::KL, Maneuver::LR};
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < 3; ++c) {
        const double exact = cfg.class_mix[c] * static_cast<double>(cfg.count);
        counts[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        remainders[c] = exact - static_cast<double>(counts[c]);
        assigned += counts[c];
    }
    while (assigned < cfg.count) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < 3; ++c)
            if (remainders[c] > remainders[best]) best = c;
        ++counts[best];
        remainders[best] = -1.0;
        ++assigned;
    }
    std::vector<Maneuver> labels;
    labels.reserve(cfg.count);
    for (std::size_t c = 0; c < 3; ++c)
        labels.insert(labels.end(), counts[c], classes[c]);
    return labels;
}

}  // namespace

Dataset generate_synthetic(const GeneratorConfig& cfg, const TimeGrid& grid,
                           std::vector<SyntheticTruth>* truth) {
    if (cfg.count < 1) throw UsageError("generator count must be at least 1");
    const double mix_sum = cfg.class_mix[0] + cfg.class_mix[1] + cfg.class_mix[2];
    if (std::fabs(mix_sum - 1.0) > 1e-9)
        throw UsageError("class mix must sum to 1");
    for (double m : cfg.class_mix)
        if (m < 0.0) throw UsageError("class mix fractions must be nonnegative");
    if (cfg.noise_sigma < 0.0) throw UsageError("noise sigma must be nonnegative");

    Rng rng(cfg.seed);
    std::vector<Maneuver> labels = allocate_labels(cfg);
    rng.shuffle(labels);

    const std::size_t O = grid.obs_steps;
    const std::size_t P = grid.pred_steps;

    Dataset ds;
    ds.grid = grid;
    ds.split_seed = cfg.seed;
    ds.scenarios.reserve(cfg.count);
    if (truth) {
        truth->clear();
        truth->reserve(cfg.count);
    }

    using namespace gen_ranges;
    for (Maneuver label : labels) {
        const double v0x = rng.uniform(v0x_min, v0x_max);
        const double a_x = rng.uniform(ax_min, ax_max);
        double lambda = 0.0, mu = 0.0;
        switch (label) {
            case Maneuver::LL:
                lambda = rng.uniform(lambda_ll_min, lambda_ll_max);
                mu = rng.uniform(mu_lc_min, mu_lc_max);
                break;
            case Maneuver::LR:
                lambda = rng.uniform(lambda_lr_min, lambda_lr_max);
                mu = rng.uniform(mu_lc_min, mu_lc_max);
                break;
            case Maneuver::KL:
                lambda = rng.uniform(lambda_kl_min, lambda_kl_max);
                mu = rng.uniform(mu_kl_min, mu_kl_max);
                break;
        }

        Scenario s;
        s.label = label;
        s.target_future = Mat(P, 2);
        for (std::size_t i = 1; i <= P; ++i) {
            const double t = grid.t(i);
            s.target_future(i - 1, 0) = v0x * t + 0.5 * a_x * t * t;
            s.target_future(i - 1, 1) = lateral_at(t, lambda, mu, grid);
        }

        s.target_obs = Mat(O, 2);
        // Target track through the observation window in the t_0 frame;
        // needed for the neighbors' relative rows.
        std::vector<double> tgt_x(O), tgt_y(O);
        for (std::size_t k = 1; k <= O; ++k) {
            const double t = grid.obs_time(k);
            tgt_x[k - 1] = v0x * t + 0.5 * a_x * t * t;
            tgt_y[k - 1] = lateral_at(t, lambda, mu, grid);
            s.target_obs(k - 1, 0) = v0x + a_x * t;
            s.target_obs(k - 1, 1) = lateral_velocity_at(t, lambda, mu, grid);
        }

        s.neighbor_obs.assign(kNeighborSlots, Mat(O, 4));
        for (std::size_t slot = 0; slot < kNeighborSlots; ++slot) {
            Mat& obs = s.neighbor_obs[slot];
            const bool present = rng.uniform() < cfg.neighbor_presence;
            if (!present) {
                fill_absent_neighbor(obs, slot);
                continue;
            }
            const double lane = slot_lane_offset(slot);
            double x0;
            if (slot <= 2) x0 = rng.uniform(8.0, 60.0);        // front row
            else if (slot <= 4) x0 = rng.uniform(-6.0, 6.0);   // alongside
            else x0 = -rng.uniform(8.0, 60.0);                 // rear row
            const double vn = v0x + rng.uniform(-4.0, 4.0);
            for (std::size_t k = 1; k <= O; ++k) {
                const double t = grid.obs_time(k);
                obs(k - 1, 0) = x0 + vn * t - tgt_x[k - 1];
                obs(k - 1, 1) = lane - tgt_y[k - 1];
                obs(k - 1, 2) = vn - s.target_obs(k - 1, 0);
                obs(k - 1, 3) = 0.0 - s.target_obs(k - 1, 1);
            }
        }

        if (cfg.noise_sigma > 0.0) {
            for (double& v : s.target_obs.data) v += cfg.noise_sigma * rng.normal();
            for (Mat& nb : s.neighbor_obs)
                for (double& v : nb.data) v += cfg.noise_sigma * rng.normal();
        }

        ds.scenarios.push_back(std::move(s));
        if (truth) truth->push_back(SyntheticTruth{v0x, a_x, lambda, mu, label});
    }
    return ds;
}

}  // namespace dvae
