#pragma once

#include <array>
#include <vector>

#include "dvae/nn.hpp"
#include "dvae/scenario.hpp"
#include "dvae/tape.hpp"
#include "dvae/types.hpp"

namespace dvae {

// Cooperative-context encoder: one LSTM over the target's velocity sequence,
// one (shared by default) LSTM over each neighbor slot's relative sequence,
// final hidden states concatenated into an FNN, then linear heads producing
// the 3-dimensional latent mean and, for the variational models, the
// log-variance.
struct EncoderConfig {
    std::size_t target_hidden = 8;
    std::size_t neighbor_hidden = 16;
    bool shared_neighbor_lstm = true;
    std::array<std::size_t, 4> fnn_dims{136, 64, 64, 18};

    // Fixed input feature scaling applied before the LSTMs. The target's
    // lateral velocity carries the maneuver signal and is amplified; the
    // neighbor channels are damped so the context block does not drown the
    // two target dimensions in the concatenated feature vector.
    double scale_target_vx = 0.05;
    double scale_target_vy = 8.0;
    double scale_neighbor_x = 0.002;
    double scale_neighbor_y = 0.02;
    double scale_neighbor_vx = 0.01;
    double scale_neighbor_vy = 0.1;
};

struct EncoderNet {
    EncoderConfig cfg;
    LstmCell target_lstm;
    std::vector<LstmCell> neighbor_lstms;  // one cell when shared
    DenseLayer fnn1, fnn2, fnn3;
    DenseLayer head_mu;
    DenseLayer head_logvar;  // absent (out_dim 0) for the deterministic AE
    bool has_logvar = false;

    const LstmCell& neighbor_cell(std::size_t slot) const {
        return cfg.shared_neighbor_lstm ? neighbor_lstms[0] : neighbor_lstms[slot];
    }
};

// Registers all encoder entries on the store (uninitialized; see
// init_encoder). with_logvar_head selects between the variational heads
// (mu + logvar) and the plain 3-dimensional projection.
EncoderNet build_encoder(ParamStore& store, const EncoderConfig& cfg, bool with_logvar_head);

void init_encoder(ParamStore& store, const EncoderNet& net, Rng& rng);

struct EncoderTapeOutput {
    Tape::NodeId mu = 0;
    Tape::NodeId logvar = 0;  // only valid when the net has the logvar head
};

EncoderTapeOutput encode_on_tape(Tape& tape, ParamStore& store, const EncoderNet& net,
                                 const Scenario& scenario);

// Plain evaluation: mean and std (= exp(0.5 logvar)); for a net without the
// logvar head the std is reported as zero-free exp(0) = 1 placeholder and
// callers should treat the mean as the deterministic latent.
LatentGaussian encode(ParamStore& store, const EncoderNet& net, const Scenario& scenario);

// z = mean + std (.) eps.
std::array<double, kLatentDim> reparameterize(const LatentGaussian& g,
                                              const std::array<double, kLatentDim>& eps);

}  // namespace dvae
