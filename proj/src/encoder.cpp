#include "dvae/encoder.hpp"

#include <cmath>

#include "dvae/errors.hpp"

namespace dvae {

EncoderNet build_encoder(ParamStore& store, const EncoderConfig& cfg, bool with_logvar_head) {
    const std::size_t fnn_in = cfg.target_hidden + kNeighborSlots * cfg.neighbor_hidden;
    if (cfg.fnn_dims[0] != fnn_in)
        throw ConfigError("encoder FNN input " + std::to_string(cfg.fnn_dims[0]) +
                          " does not match concatenated hidden size " +
                          std::to_string(fnn_in));

    EncoderNet net;
    net.cfg = cfg;
    net.has_logvar = with_logvar_head;
    net.target_lstm = add_lstm(store, "encoder.target_lstm", 2, cfg.target_hidden);
    if (cfg.shared_neighbor_lstm) {
        net.neighbor_lstms.push_back(add_lstm(store, "encoder.nbr_lstm", 4, cfg.neighbor_hidden));
    } else {
        for (std::size_t j = 0; j < kNeighborSlots; ++j)
            net.neighbor_lstms.push_back(add_lstm(
                store, "encoder.nbr_lstm" + std::to_string(j), 4, cfg.neighbor_hidden));
    }
    net.fnn1 = add_dense(store, "encoder.fnn1", cfg.fnn_dims[0], cfg.fnn_dims[1], Activation::tanh);
    net.fnn2 = add_dense(store, "encoder.fnn2", cfg.fnn_dims[1], cfg.fnn_dims[2], Activation::tanh);
    net.fnn3 = add_dense(store, "encoder.fnn3", cfg.fnn_dims[2], cfg.fnn_dims[3], Activation::tanh);
    net.head_mu = add_dense(store, "encoder.head_mu", cfg.fnn_dims[3], kLatentDim,
                            Activation::identity);
    if (with_logvar_head)
        net.head_logvar = add_dense(store, "encoder.head_logvar", cfg.fnn_dims[3], kLatentDim,
                                    Activation::identity);
    return net;
}

void init_encoder(ParamStore& store, const EncoderNet& net, Rng& rng) {
    init_lstm(store, net.target_lstm, rng);
    for (const LstmCell& cell : net.neighbor_lstms) init_lstm(store, cell, rng);
    init_dense(store, net.fnn1, rng);
    init_dense(store, net.fnn2, rng);
    init_dense(store, net.fnn3, rng);
    init_dense(store, net.head_mu, rng);
    if (net.has_logvar) init_dense(store, net.head_logvar, rng);
}

namespace {

Mat scaled_target_obs(const Scenario& s, const EncoderConfig& cfg) {
    Mat m = s.target_obs;
    for (std::size_t r = 0; r < m.rows; ++r) {
        m(r, 0) *= cfg.scale_target_vx;
        m(r, 1) *= cfg.scale_target_vy;
    }
    return m;
}

Mat scaled_neighbor_obs(const Mat& obs, const EncoderConfig& cfg) {
    Mat m = obs;
    for (std::size_t r = 0; r < m.rows; ++r) {
        m(r, 0) *= cfg.scale_neighbor_x;
        m(r, 1) *= cfg.scale_neighbor_y;
        m(r, 2) *= cfg.scale_neighbor_vx;
        m(r, 3) *= cfg.scale_neighbor_vy;
    }
    return m;
}

}  // namespace

EncoderTapeOutput encode_on_tape(Tape& tape, ParamStore& store, const EncoderNet& net,
                                 const Scenario& scenario) {
    if (scenario.neighbor_obs.size() != kNeighborSlots)
        throw ConfigError("encoder expects " + std::to_string(kNeighborSlots) +
                          " neighbor slots, scenario has " +
                          std::to_string(scenario.neighbor_obs.size()));
    if (scenario.target_obs.cols != 2)
        throw ConfigError("target observation must have 2 columns");

    std::vector<Tape::NodeId> hiddens;
    hiddens.reserve(1 + kNeighborSlots);
    hiddens.push_back(
        lstm_run(tape, store, net.target_lstm, scaled_target_obs(scenario, net.cfg)).h);
    for (std::size_t j = 0; j < kNeighborSlots; ++j)
        hiddens.push_back(lstm_run(tape, store, net.neighbor_cell(j),
                                   scaled_neighbor_obs(scenario.neighbor_obs[j], net.cfg))
                              .h);

    Tape::NodeId x = tape.concat(hiddens);
    x = dense_apply(tape, store, net.fnn1, x);
    x = dense_apply(tape, store, net.fnn2, x);
    x = dense_apply(tape, store, net.fnn3, x);

    EncoderTapeOutput out;
    out.mu = dense_apply(tape, store, net.head_mu, x);
    if (net.has_logvar) out.logvar = dense_apply(tape, store, net.head_logvar, x);
    return out;
}

LatentGaussian encode(ParamStore& store, const EncoderNet& net, const Scenario& scenario) {
    Tape tape;
    const EncoderTapeOutput out = encode_on_tape(tape, store, net, scenario);
    LatentGaussian g;
    auto mu = tape.value(out.mu);
    for (std::size_t d = 0; d < kLatentDim; ++d) g.mean[d] = mu[d];
    if (net.has_logvar) {
        auto lv = tape.value(out.logvar);
        for (std::size_t d = 0; d < kLatentDim; ++d) g.std[d] = std::exp(0.5 * lv[d]);
    } else {
        g.std.fill(1.0);
    }
    return g;
}

std::array<double, kLatentDim> reparameterize(const LatentGaussian& g,
                                              const std::array<double, kLatentDim>& eps) {
    std::array<double, kLatentDim> z{};
    for (std::size_t d = 0; d < kLatentDim; ++d) z[d] = g.mean[d] + g.std[d] * eps[d];
    return z;
}

}  // namespace dvae
