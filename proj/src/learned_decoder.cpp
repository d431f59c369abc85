#include "dvae/learned_decoder.hpp"

#include "dvae/errors.hpp"

namespace dvae {

LearnedDecoderNet build_learned_decoder(ParamStore& store, const LearnedDecoderConfig& cfg,
                                        std::size_t pred_steps) {
    LearnedDecoderNet net;
    net.cfg = cfg;
    net.pred_steps = pred_steps;
    net.expand1 = add_dense(store, "decoder.expand1", kLatentDim, cfg.expand1, Activation::tanh);
    net.expand2 = add_dense(store, "decoder.expand2", cfg.expand1, cfg.expand2, Activation::tanh);
    net.lstm_x = add_lstm(store, "decoder.lstm_x", cfg.expand2, cfg.lstm_hidden);
    net.lstm_y = add_lstm(store, "decoder.lstm_y", cfg.expand2, cfg.lstm_hidden);
    net.out_x = add_dense(store, "decoder.out_x", cfg.lstm_hidden, pred_steps, Activation::identity);
    net.out_y = add_dense(store, "decoder.out_y", cfg.lstm_hidden, pred_steps, Activation::identity);
    return net;
}

void init_learned_decoder(ParamStore& store, const LearnedDecoderNet& net, Rng& rng) {
    init_dense(store, net.expand1, rng);
    init_dense(store, net.expand2, rng);
    init_lstm(store, net.lstm_x, rng);
    init_lstm(store, net.lstm_y, rng);
    init_dense(store, net.out_x, rng);
    init_dense(store, net.out_y, rng);
}

namespace {

Tape::NodeId axis_head(Tape& tape, ParamStore& store, const LearnedDecoderNet& net,
                       const LstmCell& cell, const DenseLayer& out, Tape::NodeId expansion) {
    LstmNodeState state = lstm_zero_state(tape, cell);
    const std::size_t steps = net.cfg.repeat_unroll ? net.pred_steps : 1;
    for (std::size_t t = 0; t < steps; ++t)
        state = lstm_step(tape, store, cell, expansion, state);
    return dense_apply(tape, store, out, state.h);
}

}  // namespace

Tape::NodeId decode_learned_on_tape(Tape& tape, ParamStore& store,
                                    const LearnedDecoderNet& net, Tape::NodeId z) {
    if (tape.size(z) != kLatentDim)
        throw ConfigError("learned decoder expects a 3-dimensional latent node");
    Tape::NodeId x = dense_apply(tape, store, net.expand1, z);
    x = dense_apply(tape, store, net.expand2, x);
    const Tape::NodeId xs = axis_head(tape, store, net, net.lstm_x, net.out_x, x);
    const Tape::NodeId ys = axis_head(tape, store, net, net.lstm_y, net.out_y, x);
    const Tape::NodeId parts[2] = {xs, ys};
    return tape.concat(parts);
}

Trajectory decode_learned(ParamStore& store, const LearnedDecoderNet& net,
                          const std::array<double, kLatentDim>& z, const TimeGrid& grid) {
    if (grid.pred_steps != net.pred_steps)
        throw ConfigError("learned decoder was built for P=" + std::to_string(net.pred_steps));
    Tape tape;
    const Tape::NodeId zn = tape.constant(std::span<const double>(z.data(), z.size()));
    const Tape::NodeId out = decode_learned_on_tape(tape, store, net, zn);
    auto v = tape.value(out);
    Trajectory traj;
    traj.grid = grid;
    traj.xs.assign(v.begin(), v.begin() + grid.pred_steps);
    traj.ys.assign(v.begin() + grid.pred_steps, v.end());
    return traj;
}

}  // namespace dvae
