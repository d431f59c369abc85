#include "dvae/descriptive_decoder.hpp"

#include <cmath>

namespace dvae {

double logistic(double u) {
    if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

std::vector<double> predict_longitudinal(double accel, double v0x, const TimeGrid& grid) {
    std::vector<double> xs(grid.pred_steps);
    for (std::size_t i = 1; i <= grid.pred_steps; ++i) {
        const double t = grid.t(i);
        xs[i - 1] = v0x * t + 0.5 * accel * t * t;
    }
    return xs;
}

std::vector<double> predict_lateral(double lambda, double stretch, const TimeGrid& grid) {
    std::vector<double> ys(grid.pred_steps);
    const double anchor = logistic(stretch * grid.tau0());
    for (std::size_t i = 1; i <= grid.pred_steps; ++i)
        ys[i - 1] = lambda * (logistic(stretch * grid.tau(i)) - anchor);
    return ys;
}

Trajectory decode_params(const LatentParams& lp, double v0x, const TimeGrid& grid) {
    Trajectory traj;
    traj.grid = grid;
    traj.xs = predict_longitudinal(lp.a_x, v0x, grid);
    traj.ys = predict_lateral(lp.lambda, lp.stretch, grid);
    return traj;
}

Trajectory decode(const std::array<double, kLatentDim>& z, double v0x, const TimeGrid& grid) {
    return decode_params(LatentParams::from_z(z), v0x, grid);
}

DecoderJacobian decoder_gradients(const std::array<double, kLatentDim>& z, const TimeGrid& grid) {
    const std::size_t P = grid.pred_steps;
    DecoderJacobian jac;
    jac.dx_dz1.resize(P);
    jac.dy_dz2.resize(P);
    jac.dy_dz3.resize(P);

    const double lambda = z[1];
    const double mu = std::exp(z[2]);
    const double tau0 = grid.tau0();
    const double s0 = logistic(mu * tau0);
    const double anchor_slope = s0 * (1.0 - s0) * tau0;

    for (std::size_t i = 1; i <= P; ++i) {
        const double t = grid.t(i);
        const double tau = grid.tau(i);
        const double s = logistic(mu * tau);
        jac.dx_dz1[i - 1] = 0.5 * t * t;
        jac.dy_dz2[i - 1] = s - s0;
        jac.dy_dz3[i - 1] = lambda * mu * (s * (1.0 - s) * tau - anchor_slope);
    }
    return jac;
}

Tape::NodeId decode_on_tape(Tape& tape, Tape::NodeId z, double v0x, const TimeGrid& grid) {
    if (tape.size(z) != kLatentDim)
        throw ConfigError("decode_on_tape: latent node must have dimension 3");
    auto zv = tape.value(z);
    const std::array<double, kLatentDim> zvals{zv[0], zv[1], zv[2]};
    const Trajectory traj = decode(zvals, v0x, grid);

    const std::size_t P = grid.pred_steps;
    std::vector<double> flat(2 * P);
    std::copy(traj.xs.begin(), traj.xs.end(), flat.begin());
    std::copy(traj.ys.begin(), traj.ys.end(), flat.begin() + P);

    return tape.custom(std::move(flat), [z, zvals, grid, P](Tape& t, Tape::NodeId out) {
        const DecoderJacobian jac = decoder_gradients(zvals, grid);
        auto dy = t.grad(out);
        auto dz = t.grad(z);
        double acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
            acc1 += dy[i] * jac.dx_dz1[i];
            acc2 += dy[P + i] * jac.dy_dz2[i];
            acc3 += dy[P + i] * jac.dy_dz3[i];
        }
        dz[0] += acc1;
        dz[1] += acc2;
        dz[2] += acc3;
    });
}

}  // namespace dvae
