#include "dvae/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace dvae {

GradCheckReport grad_check(const std::function<double(ParamStore&, bool with_grad)>& forward,
                           ParamStore& store, const GradCheckOptions& options) {
    GradCheckReport report;
    if (store.entry_count() == 0) return report;

    store.zero_grads();
    forward(store, true);

    // Snapshot the analytic gradients before the probing passes overwrite
    // anything.
    std::vector<std::vector<double>> analytic(store.entry_count());
    for (std::size_t e = 0; e < store.entry_count(); ++e)
        analytic[e] = store.entry(e).grads;

    Rng rng(options.sample_seed);
    const double h = options.step;

    for (std::size_t e = 0; e < store.entry_count(); ++e) {
        ParamEntry& entry = store.entry(e);
        GradCheckBlock block;
        block.name = entry.name;

        std::vector<std::size_t> coords;
        if (options.samples_per_block == 0 || options.samples_per_block >= entry.size()) {
            coords.resize(entry.size());
            for (std::size_t i = 0; i < entry.size(); ++i) coords[i] = i;
        } else {
            coords.reserve(options.samples_per_block);
            for (std::size_t k = 0; k < options.samples_per_block; ++k)
                coords.push_back(static_cast<std::size_t>(rng.index(entry.size())));
            std::sort(coords.begin(), coords.end());
            coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
        }

        for (std::size_t i : coords) {
            const double saved = entry.values[i];
            entry.values[i] = saved + h;
            const double plus = forward(store, false);
            entry.values[i] = saved - h;
            const double minus = forward(store, false);
            entry.values[i] = saved;

            const double numeric = (plus - minus) / (2.0 * h);
            const double rel = std::fabs(analytic[e][i] - numeric) /
                               std::max(1.0, std::fabs(numeric));
            if (rel > block.max_rel_err) {
                block.max_rel_err = rel;
                block.analytic_at_worst = analytic[e][i];
                block.numeric_at_worst = numeric;
            }
            ++block.checked;
        }
        report.blocks.push_back(std::move(block));
    }

    // Leave the analytic gradients in place for the caller.
    for (std::size_t e = 0; e < store.entry_count(); ++e)
        store.entry(e).grads = analytic[e];
    return report;
}

}  // namespace dvae
