#pragma once

#include <cstdint>
#include <span>

#include "dvae/mat.hpp"
#include "dvae/tape.hpp"
#include "dvae/types.hpp"

namespace dvae {

struct LossBreakdown {
    double total = 0.0;
    double reconstruction = 0.0;
    double kl = 0.0;
    double kl_weight = 0.0;
};

// Mean of squared componentwise errors over all 2P entries of the
// trajectory against a P x 2 target matrix.
double mse_reconstruction(const Trajectory& pred, const Mat& target);

// Analytic KL(N(mu, diag(sigma^2)) || N(0, I)) =
// 0.5 * sum(mu^2 + sigma^2 - 1 - ln sigma^2).
double kl_standard_normal(const LatentGaussian& g);

LossBreakdown vae_objective(const Trajectory& pred, const Mat& target,
                            const LatentGaussian& g, double kl_weight);

// Tape versions used in training. The prediction node carries the
// concatenated [xs..., ys...] layout produced by the decoders.
Tape::NodeId mse_on_tape(Tape& tape, Tape::NodeId pred, const Mat& target);
Tape::NodeId kl_on_tape(Tape& tape, Tape::NodeId mu, Tape::NodeId logvar);

// Process-wide count of KL evaluations (both plain and tape form); test
// instrumentation for the no-KL contract of the deterministic autoencoder.
std::uint64_t kl_eval_count();

}  // namespace dvae
