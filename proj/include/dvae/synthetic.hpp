#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dvae/scenario.hpp"

namespace dvae {

// Synthetic highway scenarios drawn from the decoder's own motion family:
// constant-acceleration longitudinal motion and offset-subtracted sigmoid
// lateral motion, back-simulated through the observation window. Up to 8
// neighbors ride along in the positional grid with constant velocity.
// Observation entries receive i.i.d. Gaussian noise of std noise_sigma; the
// future trajectory stays exact.
struct GeneratorConfig {
    std::size_t count = 0;
    // Fractions per class in order LL, KL, LR; must sum to 1. Class counts
    // are allocated exactly (largest-remainder rounding), then shuffled.
    std::array<double, 3> class_mix{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double neighbor_presence = 0.6;
};

// Parameter ranges of the generator, shared with tests and the fitting
// round-trips.
namespace gen_ranges {
inline constexpr double v0x_min = 20.0, v0x_max = 40.0;
inline constexpr double ax_min = -2.0, ax_max = 2.0;
inline constexpr double lambda_ll_min = 3.0, lambda_ll_max = 4.2;
inline constexpr double lambda_lr_min = -4.2, lambda_lr_max = -3.0;
inline constexpr double lambda_kl_min = -0.3, lambda_kl_max = 0.3;
inline constexpr double mu_lc_min = 0.6, mu_lc_max = 1.6;
inline constexpr double mu_kl_min = 0.01, mu_kl_max = 0.2;
}  // namespace gen_ranges

// Ground-truth motion parameters of a generated scenario, reported in
// scenario order for oracle round-trips.
struct SyntheticTruth {
    double v0x = 0.0;
    double a_x = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    Maneuver label = Maneuver::KL;
};

Dataset generate_synthetic(const GeneratorConfig& cfg, const TimeGrid& grid,
                           std::vector<SyntheticTruth>* truth = nullptr);

}  // namespace dvae
