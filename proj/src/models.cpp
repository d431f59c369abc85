#include "dvae/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dvae/descriptive_decoder.hpp"
#include "dvae/errors.hpp"
#include "dvae/losses.hpp"

namespace dvae {

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::dvae: return "dvae";
        case ModelKind::vae: return "vae";
        case ModelKind::deae: return "deae";
        case ModelKind::cv: return "cv";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "dvae") return ModelKind::dvae;
    if (s == "vae") return ModelKind::vae;
    if (s == "deae") return ModelKind::deae;
    if (s == "cv") return ModelKind::cv;
    throw UsageError("unknown model kind: " + s + " (expected dvae|vae|deae|cv)");
}

Model build_model(ModelKind kind, const TimeGrid& grid, std::uint64_t seed,
                  const EncoderConfig& enc_cfg, const LearnedDecoderConfig& dec_cfg) {
    Model m;
    m.kind = kind;
    m.grid = grid;
    m.store.set_rng_seed(seed);
    if (kind == ModelKind::cv) return m;

    const bool variational = kind != ModelKind::deae;
    m.encoder = build_encoder(m.store, enc_cfg, variational);
    if (kind == ModelKind::vae)
        m.decoder = build_learned_decoder(m.store, dec_cfg, grid.pred_steps);

    Rng rng(seed);
    init_encoder(m.store, m.encoder, rng);
    if (kind == ModelKind::vae) init_learned_decoder(m.store, m.decoder, rng);
    return m;
}

void save_model(const Model& model, const std::string& path) {
    save_checkpoint(model.store, to_string(model.kind), path);
}

Model load_model(const std::string& path, const TimeGrid& grid) {
    const CheckpointHeader header = peek_checkpoint(path);
    const ModelKind kind = model_kind_from_string(header.kind);
    if (kind == ModelKind::cv)
        throw ConfigError(path + ": constant-velocity model has no checkpoint");

    // The architecture flags that alter the entry list are recovered from
    // the header before rebuilding.
    Model m = build_model(kind, grid, header.seed);
    try {
        load_checkpoint(m.store, path);
    } catch (const ConfigError&) {
        EncoderConfig enc_cfg;
        enc_cfg.shared_neighbor_lstm = false;
        m = build_model(kind, grid, header.seed, enc_cfg);
        load_checkpoint(m.store, path);
    }
    return m;
}

namespace {

struct SampleLoss {
    double total = 0.0;
    double recon = 0.0;
    double kl = 0.0;
};

// Builds the forward graph for one sample and returns the scalar loss node.
Tape::NodeId sample_loss_on_tape(Tape& tape, Model& model, const Scenario& scenario,
                                 const std::array<double, kLatentDim>& eps,
                                 double kl_weight, SampleLoss* parts) {
    const EncoderTapeOutput enc = encode_on_tape(tape, model.store, model.encoder, scenario);

    Tape::NodeId z;
    Tape::NodeId kl_node = 0;
    const bool variational = model.kind != ModelKind::deae;
    if (variational) {
        const Tape::NodeId sigma =
            tape.activation(tape.scale(enc.logvar, 0.5), Activation::exp);
        const Tape::NodeId eps_node =
            tape.constant(std::span<const double>(eps.data(), eps.size()));
        z = tape.add(enc.mu, tape.hadamard(sigma, eps_node));
        kl_node = kl_on_tape(tape, enc.mu, enc.logvar);
    } else {
        z = enc.mu;
    }

    Tape::NodeId traj;
    if (model.kind == ModelKind::vae)
        traj = decode_learned_on_tape(tape, model.store, model.decoder, z);
    else
        traj = decode_on_tape(tape, z, scenario.last_vx(), model.grid);

    const Tape::NodeId recon = mse_on_tape(tape, traj, scenario.target_future);
    Tape::NodeId total = recon;
    if (variational) total = tape.add_scaled(recon, 1.0, kl_node, kl_weight);

    if (parts) {
        parts->recon = tape.scalar(recon);
        parts->kl = variational ? tape.scalar(kl_node) : 0.0;
        parts->total = tape.scalar(total);
    }
    return total;
}

}  // namespace

std::vector<EpochLoss> train(Model& model, const Dataset& train_ds, const TrainConfig& cfg) {
    if (model.kind == ModelKind::cv)
        throw UsageError("the constant-velocity model has no training");
    if (cfg.lr <= 0.0) throw UsageError("learning rate must be positive");
    if (cfg.epochs < 1) throw UsageError("epoch count must be at least 1");
    if (cfg.batch_size < 1) throw UsageError("batch size must be at least 1");
    if (train_ds.size() == 0) throw UsageError("empty training set");
    if (!train_ds.grid.matches(model.grid))
        throw ConfigError("training data grid does not match the model grid");

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(train_ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    Tape tape;
    std::vector<EpochLoss> log;
    log.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double sum_total = 0.0, sum_recon = 0.0, sum_kl = 0.0;

        std::size_t at = 0;
        while (at < order.size()) {
            const std::size_t batch_end =
                std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
            const double inv_batch = 1.0 / static_cast<double>(batch_end - at);
            model.store.zero_grads();

            for (std::size_t b = at; b < batch_end; ++b) {
                const Scenario& scenario = train_ds.scenarios[order[b]];
                std::array<double, kLatentDim> eps{};
                if (model.kind != ModelKind::deae)
                    for (double& e : eps) e = rng.normal();

                tape.reset();
                SampleLoss parts;
                const Tape::NodeId loss =
                    sample_loss_on_tape(tape, model, scenario, eps, cfg.kl_weight, &parts);
                if (!std::isfinite(parts.total))
                    throw NumericError("non-finite training loss at epoch " +
                                       std::to_string(epoch) + ", sample " +
                                       std::to_string(order[b]));
                tape.backward(loss, inv_batch);
                sum_total += parts.total;
                sum_recon += parts.recon;
                sum_kl += parts.kl;
            }

            model.store.clip_grads(cfg.grad_clip);
            model.store.sgd_step(cfg.lr);
            at = batch_end;
        }

        const double n = static_cast<double>(train_ds.size());
        log.push_back(EpochLoss{epoch, sum_total / n, sum_recon / n, sum_kl / n});
    }
    return log;
}

Prediction predict(Model& model, const Scenario& scenario, PredictMode mode, Rng* eps_rng) {
    Prediction out;
    if (model.kind == ModelKind::cv) {
        out.trajectory = cv_predict(scenario.last_vx(), scenario.last_vy(), model.grid);
        return out;
    }

    const LatentGaussian g = encode(model.store, model.encoder, scenario);
    std::array<double, kLatentDim> eps{};
    if (mode == PredictMode::sample && model.kind != ModelKind::deae) {
        if (eps_rng == nullptr)
            throw UsageError("sample mode needs an epsilon source");
        for (double& e : eps) e = eps_rng->normal();
    }
    const std::array<double, kLatentDim> z =
        model.kind == ModelKind::deae ? g.mean : reparameterize(g, eps);

    if (model.kind == ModelKind::vae) {
        out.trajectory = decode_learned(model.store, model.decoder, z, model.grid);
        return out;
    }
    const LatentParams lp = LatentParams::from_z(z);
    out.trajectory = decode_params(lp, scenario.last_vx(), model.grid);
    out.latent = lp;
    return out;
}

Trajectory cv_predict(double v0x, double v0y, const TimeGrid& grid) {
    Trajectory traj;
    traj.grid = grid;
    traj.xs.resize(grid.pred_steps);
    traj.ys.resize(grid.pred_steps);
    for (std::size_t i = 1; i <= grid.pred_steps; ++i) {
        const double t = grid.t(i);
        traj.xs[i - 1] = v0x * t;
        traj.ys[i - 1] = v0y * t;
    }
    return traj;
}

}  // namespace dvae
