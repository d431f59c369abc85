#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dvae/descriptive_decoder.hpp"
#include "dvae/models.hpp"
#include "dvae/rng.hpp"
#include "test_util.hpp"

using namespace dvae;

namespace {

// Independent scalar oracle for the lateral curve; written from the plain
// 1/(1+e^-u) form, no shared code with the implementation's stable branch.
double lateral_oracle(double t, double lambda, double mu, double t_pred) {
    auto sig = [](double u) { return 1.0 / (1.0 + std::exp(-u)); };
    const double tau = t - 0.5 * t_pred;
    const double tau0 = -0.5 * t_pred;
    return lambda * sig(mu * tau) - lambda * sig(mu * tau0);
}

double longitudinal_oracle(double t, double a, double v0x) {
    return v0x * t + 0.5 * a * t * t;
}

}  // namespace

TEST_CASE("longitudinal prediction is zero for a stationary vehicle") {
    const TimeGrid grid;
    for (double x : predict_longitudinal(0.0, 0.0, grid)) CHECK(x == 0.0);
}

TEST_CASE("longitudinal prediction evaluates the constant-acceleration model") {
    const TimeGrid grid;
    const auto xs = predict_longitudinal(2.0, 30.0, grid);
    // t = 1.0 s is step 25 on the 0.04 s grid.
    CHECK(xs[24] == doctest::Approx(31.0).epsilon(1e-12));
    Rng rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t i = 1 + rng.index(grid.pred_steps);
        const double a = rng.uniform(-3.0, 3.0);
        const double v = rng.uniform(0.0, 45.0);
        const auto pred = predict_longitudinal(a, v, grid);
        CHECK(test::close(pred[i - 1], longitudinal_oracle(grid.t(i), a, v), 1e-12));
    }
}

TEST_CASE("zero acceleration reduces to the constant-velocity prediction") {
    const TimeGrid grid;
    const auto xs = predict_longitudinal(0.0, 27.5, grid);
    const Trajectory cv = cv_predict(27.5, 0.0, grid);
    for (std::size_t i = 0; i < grid.pred_steps; ++i) CHECK(xs[i] == cv.xs[i]);
}

TEST_CASE("lateral prediction is identically zero for lambda = 0") {
    const TimeGrid grid;
    for (double y : predict_lateral(0.0, 1.3, grid)) CHECK(y == 0.0);
}

TEST_CASE("lateral prediction matches the scalar logistic oracle") {
    const TimeGrid grid;
    const auto ys = predict_lateral(3.5, 1.0, grid);
    // Endpoint t = 5 s and midpoint t = 2.5 s, hand-derived values.
    CHECK(ys[124] == doctest::Approx(2.9690).epsilon(1e-4));
    CHECK(lateral_oracle(2.5, 3.5, 1.0, grid.t_pred) ==
          doctest::Approx(1.4845).epsilon(1e-4));

    Rng rng(19);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t i = 1 + rng.index(grid.pred_steps);
        const double lambda = rng.uniform(-8.0, 8.0);
        const double mu = std::exp(rng.uniform(-4.0, 1.6));
        const auto pred = predict_lateral(lambda, mu, grid);
        CHECK(test::close(pred[i - 1], lateral_oracle(grid.t(i), lambda, mu, grid.t_pred),
                          1e-12));
    }
}

TEST_CASE("the t0 anchor value is exactly zero") {
    const TimeGrid grid;
    Rng rng(29);
    for (int rep = 0; rep < 50; ++rep) {
        const double lambda = rng.uniform(-8.0, 8.0);
        const double mu = std::exp(rng.uniform(-4.0, 1.6));
        const double anchor =
            lambda * (logistic(mu * grid.tau0()) - logistic(mu * grid.tau0()));
        CHECK(anchor == 0.0);
    }
}

TEST_CASE("lateral curve is odd in lambda") {
    const TimeGrid grid;
    Rng rng(37);
    for (int rep = 0; rep < 50; ++rep) {
        const double lambda = rng.uniform(0.0, 8.0);
        const double mu = std::exp(rng.uniform(-4.0, 1.6));
        const auto pos = predict_lateral(lambda, mu, grid);
        const auto neg = predict_lateral(-lambda, mu, grid);
        for (std::size_t i = 0; i < grid.pred_steps; ++i)
            CHECK(test::close(pos[i], -neg[i], 1e-12));
    }
}

TEST_CASE("lateral curve is monotone for fixed-sign lambda and bounded by |lambda|") {
    const TimeGrid grid;
    Rng rng(43);
    for (int rep = 0; rep < 50; ++rep) {
        const double lambda = rng.uniform(-8.0, 8.0);
        const double mu = std::exp(rng.uniform(-4.0, 1.6));
        const auto ys = predict_lateral(lambda, mu, grid);
        for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
            if (lambda >= 0.0) CHECK(ys[i + 1] >= ys[i]);
            else CHECK(ys[i + 1] <= ys[i]);
        }
        for (double y : ys) CHECK(std::fabs(y) <= std::fabs(lambda));
    }
}

TEST_CASE("small stretch approaches the linear lane-keeping limit") {
    const TimeGrid grid;
    const double lambda = 3.5;
    for (double mu : {1e-3, 1e-4}) {
        const auto ys = predict_lateral(lambda, mu, grid);
        for (std::size_t i = 1; i <= grid.pred_steps; ++i) {
            const double linear = lambda * mu * (grid.tau(i) - grid.tau0()) / 4.0;
            CHECK(std::fabs(ys[i - 1] - linear) <= 1e-4 * mu);
        }
    }
}

TEST_CASE("decode composes the two axis predictions") {
    const TimeGrid grid;
    const std::array<double, 3> z{1.0, 3.5, 0.0};
    const Trajectory traj = decode(z, 30.0, grid);
    const auto xs = predict_longitudinal(1.0, 30.0, grid);
    const auto ys = predict_lateral(3.5, std::exp(0.0), grid);
    CHECK(traj.xs == xs);
    CHECK(traj.ys == ys);
    for (std::size_t i = 1; i <= grid.pred_steps; ++i) {
        CHECK(test::close(traj.xs[i - 1], longitudinal_oracle(grid.t(i), 1.0, 30.0), 1e-12));
        CHECK(test::close(traj.ys[i - 1], lateral_oracle(grid.t(i), 3.5, 1.0, grid.t_pred),
                          1e-12));
    }
}

TEST_CASE("decode of an all-zero latent with zero velocity is the zero trajectory") {
    const TimeGrid grid;
    const Trajectory traj = decode({0.0, 0.0, 0.7}, 0.0, grid);
    for (double v : traj.xs) CHECK(v == 0.0);
    for (double v : traj.ys) CHECK(v == 0.0);
}

TEST_CASE("closed-form jacobian hits the hand values") {
    const TimeGrid grid;
    const std::array<double, 3> z{0.5, 2.0, 0.3};
    const DecoderJacobian jac = decoder_gradients(z, grid);
    // t = 2 s is step 50; d x / d z1 = 0.5 t^2 = 2.
    CHECK(jac.dx_dz1[49] == doctest::Approx(2.0).epsilon(1e-12));

    const DecoderJacobian at_zero = decoder_gradients({0.0, 0.0, 0.3}, grid);
    for (double g : at_zero.dy_dz3) CHECK(g == 0.0);
}

TEST_CASE("closed-form jacobian matches central differences over 1000 random draws") {
    const TimeGrid grid;
    Rng rng(53);
    const double h = 1e-6;
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::array<double, 3> z{rng.uniform(-3.0, 3.0), rng.uniform(-8.0, 8.0),
                                rng.uniform(-4.0, 1.6)};
        const std::size_t i = rng.index(grid.pred_steps);
        const DecoderJacobian jac = decoder_gradients(z, grid);

        for (std::size_t k = 0; k < 3; ++k) {
            std::array<double, 3> zp = z, zm = z;
            zp[k] += h;
            zm[k] -= h;
            const Trajectory tp = decode(zp, 30.0, grid);
            const Trajectory tm = decode(zm, 30.0, grid);
            double analytic = 0.0, numeric = 0.0;
            if (k == 0) {
                analytic = jac.dx_dz1[i];
                numeric = (tp.xs[i] - tm.xs[i]) / (2.0 * h);
            } else if (k == 1) {
                analytic = jac.dy_dz2[i];
                numeric = (tp.ys[i] - tm.ys[i]) / (2.0 * h);
            } else {
                analytic = jac.dy_dz3[i];
                numeric = (tp.ys[i] - tm.ys[i]) / (2.0 * h);
            }
            const double rel =
                std::fabs(analytic - numeric) / std::max(1.0, std::fabs(numeric));
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("stretch is positive for any finite z3") {
    for (double z3 : {-700.0, -10.0, 0.0, 5.0}) {
        const LatentParams lp = LatentParams::from_z({0.0, 1.0, z3});
        CHECK(lp.stretch >= 0.0);
        CHECK(std::isfinite(lp.stretch));
        if (z3 > -700.0) CHECK(lp.stretch > 0.0);
    }
}
