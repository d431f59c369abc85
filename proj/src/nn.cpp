#include "dvae/nn.hpp"

#include <cmath>

#include "dvae/errors.hpp"

namespace dvae {

DenseLayer add_dense(ParamStore& store, const std::string& prefix,
                     std::size_t in_dim, std::size_t out_dim, Activation act) {
    DenseLayer layer;
    layer.w = store.add(prefix + ".W", {out_dim, in_dim});
    layer.b = store.add(prefix + ".b", {out_dim});
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    layer.act = act;
    return layer;
}

void init_dense(ParamStore& store, const DenseLayer& layer, Rng& rng) {
    store.init_entry(layer.w, static_cast<double>(layer.in_dim), rng);
    store.init_entry(layer.b, static_cast<double>(layer.in_dim), rng);
}

Tape::NodeId dense_apply(Tape& tape, ParamStore& store, const DenseLayer& layer,
                         Tape::NodeId input) {
    if (tape.size(input) != layer.in_dim)
        throw ConfigError("dense input length " + std::to_string(tape.size(input)) +
                          " does not match layer input dimension " +
                          std::to_string(layer.in_dim));
    const Tape::NodeId pre =
        tape.affine(tape.param(store, layer.w), tape.param(store, layer.b), input);
    if (layer.act == Activation::identity) return pre;
    return tape.activation(pre, layer.act);
}

LstmCell add_lstm(ParamStore& store, const std::string& prefix,
                  std::size_t in_dim, std::size_t hidden) {
    LstmCell cell;
    cell.w = store.add(prefix + ".W", {4 * hidden, in_dim + hidden});
    cell.b = store.add(prefix + ".b", {4 * hidden});
    cell.in_dim = in_dim;
    cell.hidden = hidden;
    return cell;
}

void init_lstm(ParamStore& store, const LstmCell& cell, Rng& rng) {
    const double fan_in = static_cast<double>(cell.in_dim + cell.hidden);
    store.init_entry(cell.w, fan_in, rng);
    store.init_entry(cell.b, fan_in, rng);
}

LstmNodeState lstm_zero_state(Tape& tape, const LstmCell& cell) {
    return LstmNodeState{tape.zeros(cell.hidden), tape.zeros(cell.hidden)};
}

LstmNodeState lstm_step(Tape& tape, ParamStore& store, const LstmCell& cell,
                        Tape::NodeId x, const LstmNodeState& state) {
    if (tape.size(x) != cell.in_dim)
        throw ConfigError("lstm input length " + std::to_string(tape.size(x)) +
                          " does not match cell input dimension " +
                          std::to_string(cell.in_dim));
    const std::size_t H = cell.hidden;
    const Tape::NodeId xh_parts[2] = {x, state.h};
    const Tape::NodeId xh = tape.concat(xh_parts);
    const Tape::NodeId pre =
        tape.affine(tape.param(store, cell.w), tape.param(store, cell.b), xh);
    const Tape::NodeId gi = tape.activation(tape.slice(pre, 0, H), Activation::sigmoid);
    const Tape::NodeId gf = tape.activation(tape.slice(pre, H, H), Activation::sigmoid);
    const Tape::NodeId gc = tape.activation(tape.slice(pre, 2 * H, H), Activation::tanh);
    const Tape::NodeId go = tape.activation(tape.slice(pre, 3 * H, H), Activation::sigmoid);
    const Tape::NodeId c_next =
        tape.add(tape.hadamard(gf, state.c), tape.hadamard(gi, gc));
    const Tape::NodeId h_next =
        tape.hadamard(go, tape.activation(c_next, Activation::tanh));
    return LstmNodeState{h_next, c_next};
}

LstmNodeState lstm_run(Tape& tape, ParamStore& store, const LstmCell& cell,
                       const Mat& sequence, std::vector<Tape::NodeId>* outputs) {
    if (sequence.rows == 0) throw ConfigError("lstm sequence must have at least one step");
    if (sequence.cols != cell.in_dim)
        throw ConfigError("lstm sequence width " + std::to_string(sequence.cols) +
                          " does not match cell input dimension " +
                          std::to_string(cell.in_dim));
    for (double v : sequence.data)
        if (!std::isfinite(v)) throw DataError("non-finite value in lstm input sequence");

    LstmNodeState state = lstm_zero_state(tape, cell);
    for (std::size_t t = 0; t < sequence.rows; ++t) {
        const Tape::NodeId x =
            tape.constant(std::span<const double>(sequence.row(t), sequence.cols));
        state = lstm_step(tape, store, cell, x, state);
        if (outputs) outputs->push_back(state.h);
    }
    return state;
}

}  // namespace dvae
