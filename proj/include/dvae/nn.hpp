#pragma once

#include <string>
#include <vector>

#include "dvae/mat.hpp"
#include "dvae/param_store.hpp"
#include "dvae/tape.hpp"

namespace dvae {

// Dense layer backed by two ParamStore entries, "<prefix>.W" [out x in]
// (row-major) and "<prefix>.b" [out].
struct DenseLayer {
    std::size_t w = 0;
    std::size_t b = 0;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation act = Activation::identity;
};

DenseLayer add_dense(ParamStore& store, const std::string& prefix,
                     std::size_t in_dim, std::size_t out_dim, Activation act);

void init_dense(ParamStore& store, const DenseLayer& layer, Rng& rng);

Tape::NodeId dense_apply(Tape& tape, ParamStore& store, const DenseLayer& layer,
                         Tape::NodeId input);

// Single LSTM cell: forget/input/output gates with sigmoid nonlinearity and
// tanh candidate/output, no peepholes. Parameters are a fused entry
// "<prefix>.W" [4H x (D+H)] over the concatenated (input, hidden) vector
// plus "<prefix>.b" [4H]. Gate row order is [input; forget; candidate;
// output].
struct LstmCell {
    std::size_t w = 0;
    std::size_t b = 0;
    std::size_t in_dim = 0;
    std::size_t hidden = 0;
};

LstmCell add_lstm(ParamStore& store, const std::string& prefix,
                  std::size_t in_dim, std::size_t hidden);

void init_lstm(ParamStore& store, const LstmCell& cell, Rng& rng);

struct LstmNodeState {
    Tape::NodeId h = 0;
    Tape::NodeId c = 0;
};

LstmNodeState lstm_zero_state(Tape& tape, const LstmCell& cell);

LstmNodeState lstm_step(Tape& tape, ParamStore& store, const LstmCell& cell,
                        Tape::NodeId x, const LstmNodeState& state);

// Runs the recurrence over the rows of a T x D sequence. Rejects non-finite
// inputs. When outputs is non-null it receives the hidden node of each step.
LstmNodeState lstm_run(Tape& tape, ParamStore& store, const LstmCell& cell,
                       const Mat& sequence, std::vector<Tape::NodeId>* outputs = nullptr);

}  // namespace dvae
