#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "dvae/tape.hpp"
#include "dvae/time_grid.hpp"
#include "dvae/types.hpp"

namespace dvae {

// Fixed, parameter-free trajectory decoder. Longitudinal motion follows a
// constant-acceleration model, lateral motion a stretched logistic S-curve
// with the value at the t=0 anchor subtracted so predictions start at zero
// lateral offset. The latent sample z maps to (a_x, lambda, stretch):
//   x_i = v0x*t_i + 0.5*z1*t_i^2
//   y_i = z2 * (sigma(mu*tau_i) - sigma(mu*tau_0)),  mu = exp(z3)

// Numerically stable logistic function.
double logistic(double u);

std::vector<double> predict_longitudinal(double accel, double v0x, const TimeGrid& grid);

std::vector<double> predict_lateral(double lambda, double stretch, const TimeGrid& grid);

Trajectory decode_params(const LatentParams& lp, double v0x, const TimeGrid& grid);

Trajectory decode(const std::array<double, kLatentDim>& z, double v0x, const TimeGrid& grid);

// Closed-form partial derivatives of the decoder output with respect to the
// latent inputs, per prediction step. The chains are decoupled: x depends
// only on z1 and y only on (z2, z3).
struct DecoderJacobian {
    std::vector<double> dx_dz1;  // 0.5 * t_i^2
    std::vector<double> dy_dz2;  // sigma(mu*tau_i) - sigma(mu*tau_0)
    std::vector<double> dy_dz3;  // lambda*e^{z3}*(s_i(1-s_i)tau_i - s_0(1-s_0)tau_0)
};

DecoderJacobian decoder_gradients(const std::array<double, kLatentDim>& z, const TimeGrid& grid);

// Tape operation producing the concatenated [xs..., ys...] vector of length
// 2P from a 3-dimensional latent node; the backward rule is the closed-form
// Jacobian above, not an unrolled graph.
Tape::NodeId decode_on_tape(Tape& tape, Tape::NodeId z, double v0x, const TimeGrid& grid);

}  // namespace dvae
