#pragma once

#include "dvae/nn.hpp"
#include "dvae/tape.hpp"
#include "dvae/time_grid.hpp"
#include "dvae/types.hpp"

namespace dvae {

// Conventional learned decoder: latent 3 -> 16 -> 64 (tanh), the 64-vector
// consumed by two LSTM heads (one per axis), each final hidden state pushed
// through a dense layer to the P output points. By default the LSTM sees
// the expansion once (sequence length 1); repeat_unroll feeds it P times
// and reads the last hidden instead.
struct LearnedDecoderConfig {
    std::size_t expand1 = 16;
    std::size_t expand2 = 64;
    std::size_t lstm_hidden = 125;
    bool repeat_unroll = false;
};

struct LearnedDecoderNet {
    LearnedDecoderConfig cfg;
    std::size_t pred_steps = 0;
    DenseLayer expand1, expand2;
    LstmCell lstm_x, lstm_y;
    DenseLayer out_x, out_y;
};

LearnedDecoderNet build_learned_decoder(ParamStore& store, const LearnedDecoderConfig& cfg,
                                        std::size_t pred_steps);

void init_learned_decoder(ParamStore& store, const LearnedDecoderNet& net, Rng& rng);

// Produces the concatenated [xs..., ys...] node of length 2P.
Tape::NodeId decode_learned_on_tape(Tape& tape, ParamStore& store,
                                    const LearnedDecoderNet& net, Tape::NodeId z);

Trajectory decode_learned(ParamStore& store, const LearnedDecoderNet& net,
                          const std::array<double, kLatentDim>& z, const TimeGrid& grid);

}  // namespace dvae
