#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dvae/param_store.hpp"
#include "dvae/rng.hpp"

namespace dvae {

// Finite-difference verification of the reverse-mode gradients. The forward
// closure must be deterministic (any sampling replaced by a fixed epsilon):
// with with_grad=true it additionally runs backward and leaves dLoss/dtheta
// in the store's grads.
struct GradCheckOptions {
    double step = 1e-5;
    // Coordinates probed per entry; 0 checks every coordinate.
    std::size_t samples_per_block = 0;
    std::uint64_t sample_seed = 0;
};

struct GradCheckBlock {
    std::string name;
    double max_rel_err = 0.0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
    std::size_t checked = 0;
};

struct GradCheckReport {
    std::vector<GradCheckBlock> blocks;

    double worst() const {
        double w = 0.0;
        for (const auto& b : blocks)
            if (b.max_rel_err > w) w = b.max_rel_err;
        return w;
    }
};

// Relative error convention: |analytic - numeric| / max(1, |numeric|).
GradCheckReport grad_check(const std::function<double(ParamStore&, bool with_grad)>& forward,
                           ParamStore& store, const GradCheckOptions& options = {});

}  // namespace dvae
