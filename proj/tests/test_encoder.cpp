#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dvae/encoder.hpp"
#include "dvae/errors.hpp"
#include "dvae/grad_check.hpp"
#include "dvae/losses.hpp"
#include "test_util.hpp"

using namespace dvae;

namespace {

EncoderConfig small_encoder_config() {
    EncoderConfig cfg;
    cfg.target_hidden = 4;
    cfg.neighbor_hidden = 3;
    cfg.fnn_dims = {4 + 8 * 3, 10, 10, 6};
    return cfg;
}

}  // namespace

TEST_CASE("encode produces a 3-dimensional gaussian with positive std") {
    const TimeGrid grid = test::small_grid();
    Rng rng(2);
    ParamStore store;
    const EncoderNet net = build_encoder(store, small_encoder_config(), true);
    init_encoder(store, net, rng);

    const Scenario s = test::random_scenario(rng, grid);
    const LatentGaussian g = encode(store, net, s);
    CHECK(g.mean.size() == 3);
    CHECK(g.std.size() == 3);
    for (double v : g.mean) CHECK(std::isfinite(v));
    for (double v : g.std) CHECK(v > 0.0);
}

TEST_CASE("all-zero parameters give zero mean and unit std") {
    const TimeGrid grid = test::small_grid();
    Rng rng(3);
    ParamStore store;
    const EncoderNet net = build_encoder(store, small_encoder_config(), true);
    // No init: entries stay zero.
    const Scenario s = test::random_scenario(rng, grid);
    const LatentGaussian g = encode(store, net, s);
    for (double v : g.mean) CHECK(v == 0.0);
    for (double v : g.std) CHECK(v == 1.0);
}

TEST_CASE("neighbor slots are positional: swapping two distinct slots changes the output") {
    const TimeGrid grid = test::small_grid();
    Rng rng(5);
    ParamStore store;
    const EncoderNet net = build_encoder(store, small_encoder_config(), true);
    init_encoder(store, net, rng);

    Scenario s = test::random_scenario(rng, grid);
    const LatentGaussian base = encode(store, net, s);
    std::swap(s.neighbor_obs[0], s.neighbor_obs[7]);
    const LatentGaussian swapped = encode(store, net, s);

    bool any_diff = false;
    for (std::size_t d = 0; d < 3; ++d)
        any_diff = any_diff || base.mean[d] != swapped.mean[d];
    CHECK(any_diff);
}

TEST_CASE("encode is a pure function: repeated calls agree bitwise") {
    const TimeGrid grid = test::small_grid();
    Rng rng(7);
    ParamStore store;
    const EncoderNet net = build_encoder(store, small_encoder_config(), true);
    init_encoder(store, net, rng);
    const Scenario s = test::random_scenario(rng, grid);

    const LatentGaussian a = encode(store, net, s);
    const LatentGaussian b = encode(store, net, s);
    CHECK(a.mean == b.mean);
    CHECK(a.std == b.std);
}

TEST_CASE("encode rejects a scenario with the wrong slot count") {
    const TimeGrid grid = test::small_grid();
    Rng rng(11);
    ParamStore store;
    const EncoderNet net = build_encoder(store, small_encoder_config(), true);
    Scenario s = test::random_scenario(rng, grid);
    s.neighbor_obs.pop_back();
    Tape tape;
    CHECK_THROWS_AS(encode_on_tape(tape, store, net, s), ConfigError);
}

TEST_CASE("build_encoder rejects an inconsistent fnn input width") {
    ParamStore store;
    EncoderConfig cfg = small_encoder_config();
    cfg.fnn_dims[0] = 99;
    CHECK_THROWS_AS(build_encoder(store, cfg, true), ConfigError);
}

TEST_CASE("encoder gradients pass the finite-difference check with fixed eps") {
    const TimeGrid grid = test::small_grid();
    Rng rng(13);
    ParamStore store;
    const EncoderNet net = build_encoder(store, small_encoder_config(), true);
    init_encoder(store, net, rng);
    const Scenario s = test::random_scenario(rng, grid);
    const std::array<double, 3> eps{0.4, -0.9, 0.2};

    Mat target(grid.pred_steps, 2);
    for (std::size_t i = 0; i < grid.pred_steps; ++i) {
        target(i, 0) = 28.0 * grid.t(i + 1);
        target(i, 1) = rng.uniform(-2.0, 2.0);
    }

    auto forward = [&](ParamStore& ps, bool with_grad) {
        Tape tape;
        const EncoderTapeOutput enc = encode_on_tape(tape, ps, net, s);
        const Tape::NodeId sigma =
            tape.activation(tape.scale(enc.logvar, 0.5), Activation::exp);
        const Tape::NodeId z = tape.add(
            enc.mu, tape.hadamard(sigma, tape.constant(std::span<const double>(
                                             eps.data(), eps.size()))));
        // Simple differentiable readout over z plus the kl term exercises
        // both heads.
        const Tape::NodeId kl = kl_on_tape(tape, enc.mu, enc.logvar);
        const Tape::NodeId z_sq = tape.hadamard(z, z);
        Tape::NodeId sum = tape.slice(z_sq, 0, 1);
        sum = tape.add(sum, tape.slice(z_sq, 1, 1));
        sum = tape.add(sum, tape.slice(z_sq, 2, 1));
        const Tape::NodeId loss = tape.add_scaled(sum, 1.0, kl, 0.7);
        if (with_grad) tape.backward(loss);
        return tape.scalar(loss);
    };

    GradCheckOptions opts;
    opts.step = 1e-5;
    opts.samples_per_block = 12;
    opts.sample_seed = 99;
    const GradCheckReport report = grad_check(forward, store, opts);
    for (const auto& block : report.blocks) {
        INFO(block.name);
        CHECK(block.max_rel_err <= 1e-4);
    }
}

TEST_CASE("reparameterize implements z = mu + sigma * eps") {
    LatentGaussian g;
    g.mean = {1.0, 2.0, 3.0};
    g.std = {1.0, 1.0, 1.0};
    const auto z = reparameterize(g, {0.5, -0.5, 0.0});
    CHECK(z[0] == 1.5);
    CHECK(z[1] == 1.5);
    CHECK(z[2] == 3.0);

    // Zero eps is evaluation mode: z collapses to the mean.
    const auto zm = reparameterize(g, {0.0, 0.0, 0.0});
    CHECK(zm == g.mean);
}

TEST_CASE("the deterministic head variant omits the logvar entries") {
    ParamStore with, without;
    build_encoder(with, small_encoder_config(), true);
    build_encoder(without, small_encoder_config(), false);
    CHECK(with.has("encoder.head_logvar.W"));
    CHECK_FALSE(without.has("encoder.head_logvar.W"));
    CHECK(with.total_values() ==
          without.total_values() + with.entry("encoder.head_logvar.W").size() +
              with.entry("encoder.head_logvar.b").size());
}

TEST_CASE("default configuration matches the published layer dimensions") {
    ParamStore store;
    const EncoderConfig cfg;
    const EncoderNet net = build_encoder(store, cfg, true);
    CHECK(store.entry("encoder.target_lstm.W").shape ==
          std::vector<std::size_t>{32, 10});
    CHECK(store.entry("encoder.nbr_lstm.W").shape ==
          std::vector<std::size_t>{64, 20});
    CHECK(store.entry("encoder.fnn1.W").shape == std::vector<std::size_t>{64, 136});
    CHECK(store.entry("encoder.fnn3.W").shape == std::vector<std::size_t>{18, 64});
    CHECK(store.entry("encoder.head_mu.W").shape == std::vector<std::size_t>{3, 18});
    CHECK(net.has_logvar);
}
