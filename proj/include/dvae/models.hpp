#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dvae/encoder.hpp"
#include "dvae/learned_decoder.hpp"
#include "dvae/param_store.hpp"
#include "dvae/scenario.hpp"
#include "dvae/types.hpp"

namespace dvae {

// The compared prediction methods. The variational models sample the latent
// during training and use the mean at evaluation; the deterministic AE has
// neither sampling nor a KL term; the constant-velocity model has no
// parameters at all.
enum class ModelKind { dvae, vae, deae, cv };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct TrainConfig {
    double lr = 0.001;
    int epochs = 5;
    int batch_size = 64;
    double kl_weight = 1.0;
    std::uint64_t seed = 0;
    // Elementwise gradient clip magnitude; <= 0 disables clipping.
    double grad_clip = 10.0;
};

struct Model {
    ModelKind kind = ModelKind::cv;
    TimeGrid grid;
    ParamStore store;
    EncoderNet encoder;
    LearnedDecoderNet decoder;  // only populated for the VAE

    bool has_encoder() const { return kind != ModelKind::cv; }
    bool has_learned_decoder() const { return kind == ModelKind::vae; }
};

Model build_model(ModelKind kind, const TimeGrid& grid, std::uint64_t seed,
                  const EncoderConfig& enc_cfg = {}, const LearnedDecoderConfig& dec_cfg = {});

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path, const TimeGrid& grid);

struct EpochLoss {
    int epoch = 0;
    double total = 0.0;
    double reconstruction = 0.0;
    double kl = 0.0;
};

// Mini-batch SGD over the training set; per-epoch running means returned.
// Aborts with the epoch/sample index on a non-finite loss.
std::vector<EpochLoss> train(Model& model, const Dataset& train_ds, const TrainConfig& cfg);

enum class PredictMode { eval, sample };

struct Prediction {
    Trajectory trajectory;
    std::optional<LatentParams> latent;  // descriptive models only
};

// eval mode uses z = mean; sample mode draws eps from the provided RNG
// (required for the variational kinds, ignored otherwise).
Prediction predict(Model& model, const Scenario& scenario, PredictMode mode,
                   Rng* eps_rng = nullptr);

// Straight-line decoupled extrapolation from the last observed velocities.
Trajectory cv_predict(double v0x, double v0y, const TimeGrid& grid);

}  // namespace dvae
