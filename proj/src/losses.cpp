#include "dvae/losses.hpp"

#include <atomic>
#include <cmath>
#include <vector>

#include "dvae/errors.hpp"

namespace dvae {

namespace {
std::atomic<std::uint64_t> g_kl_evals{0};
}

double mse_reconstruction(const Trajectory& pred, const Mat& target) {
    const std::size_t P = target.rows;
    if (target.cols != 2 || pred.xs.size() != P || pred.ys.size() != P)
        throw UsageError("mse_reconstruction: prediction/target shape mismatch");
    if (P == 0) throw UsageError("mse_reconstruction: empty target");
    double acc = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
        const double dx = pred.xs[i] - target(i, 0);
        const double dy = pred.ys[i] - target(i, 1);
        acc += dx * dx + dy * dy;
    }
    return acc / static_cast<double>(2 * P);
}

double kl_standard_normal(const LatentGaussian& g) {
    g_kl_evals.fetch_add(1, std::memory_order_relaxed);
    double acc = 0.0;
    for (std::size_t d = 0; d < kLatentDim; ++d) {
        const double mu = g.mean[d];
        const double var = g.std[d] * g.std[d];
        acc += mu * mu + var - 1.0 - std::log(var);
    }
    return 0.5 * acc;
}

LossBreakdown vae_objective(const Trajectory& pred, const Mat& target,
                            const LatentGaussian& g, double kl_weight) {
    LossBreakdown out;
    out.reconstruction = mse_reconstruction(pred, target);
    out.kl = kl_standard_normal(g);
    out.kl_weight = kl_weight;
    out.total = out.reconstruction + kl_weight * out.kl;
    return out;
}

Tape::NodeId mse_on_tape(Tape& tape, Tape::NodeId pred, const Mat& target) {
    const std::size_t P = target.rows;
    if (target.cols != 2 || tape.size(pred) != 2 * P)
        throw UsageError("mse_on_tape: prediction/target shape mismatch");
    // Flatten the target into the decoder's [xs..., ys...] layout.
    std::vector<double> flat(2 * P);
    for (std::size_t i = 0; i < P; ++i) {
        flat[i] = target(i, 0);
        flat[P + i] = target(i, 1);
    }
    auto pv = tape.value(pred);
    double acc = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double d = pv[i] - flat[i];
        acc += d * d;
    }
    const double n = static_cast<double>(flat.size());
    return tape.custom(
        {acc / n}, [pred, flat = std::move(flat), n](Tape& t, Tape::NodeId out) {
            const double seed = t.grad(out)[0];
            auto pvals = t.value(pred);
            auto pgrad = t.grad(pred);
            for (std::size_t i = 0; i < flat.size(); ++i)
                pgrad[i] += seed * 2.0 * (pvals[i] - flat[i]) / n;
        });
}

Tape::NodeId kl_on_tape(Tape& tape, Tape::NodeId mu, Tape::NodeId logvar) {
    if (tape.size(mu) != kLatentDim || tape.size(logvar) != kLatentDim)
        throw UsageError("kl_on_tape: latent nodes must have dimension 3");
    g_kl_evals.fetch_add(1, std::memory_order_relaxed);
    auto mv = tape.value(mu);
    auto lv = tape.value(logvar);
    double acc = 0.0;
    for (std::size_t d = 0; d < kLatentDim; ++d)
        acc += mv[d] * mv[d] + std::exp(lv[d]) - 1.0 - lv[d];
    return tape.custom({0.5 * acc}, [mu, logvar](Tape& t, Tape::NodeId out) {
        const double seed = t.grad(out)[0];
        auto mvals = t.value(mu);
        auto lvals = t.value(logvar);
        auto mgrad = t.grad(mu);
        auto lgrad = t.grad(logvar);
        for (std::size_t d = 0; d < kLatentDim; ++d) {
            mgrad[d] += seed * mvals[d];
            lgrad[d] += seed * 0.5 * (std::exp(lvals[d]) - 1.0);
        }
    });
}

std::uint64_t kl_eval_count() { return g_kl_evals.load(std::memory_order_relaxed); }

}  // namespace dvae
