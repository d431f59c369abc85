#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dvae/errors.hpp"
#include "dvae/time_grid.hpp"

namespace dvae {

inline constexpr std::size_t kLatentDim = 3;
inline constexpr std::size_t kNeighborSlots = 8;

enum class Maneuver { LL, KL, LR };

inline const char* to_string(Maneuver m) {
    switch (m) {
        case Maneuver::LL: return "LL";
        case Maneuver::KL: return "KL";
        case Maneuver::LR: return "LR";
    }
    return "?";
}

inline Maneuver maneuver_from_string(const std::string& s) {
    if (s == "LL") return Maneuver::LL;
    if (s == "KL") return Maneuver::KL;
    if (s == "LR") return Maneuver::LR;
    throw DataError("unknown maneuver label: " + s);
}

// Diagonal Gaussian over the latent space produced by the encoder.
struct LatentGaussian {
    std::array<double, kLatentDim> mean{};
    std::array<double, kLatentDim> std{};
};

// A latent sample interpreted through the descriptive decoder's equations:
// z1 is the longitudinal acceleration, z2 the signed lateral amplitude and
// exp(z3) the sigmoid stretch (always positive by the exponential map).
struct LatentParams {
    double a_x = 0.0;
    double lambda = 0.0;
    double stretch = 1.0;

    static LatentParams from_z(const std::array<double, kLatentDim>& z) {
        return LatentParams{z[0], z[1], std::exp(z[2])};
    }
};

struct Trajectory {
    std::vector<double> xs;
    std::vector<double> ys;
    TimeGrid grid;
};

}  // namespace dvae
