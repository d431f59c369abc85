#include "dvae/scenario.hpp"

#include <cmath>
#include <numeric>

#include "dvae/errors.hpp"
#include "dvae/rng.hpp"

namespace dvae {

std::string validate_scenario(const Scenario& s, const TimeGrid& grid) {
    const std::size_t O = grid.obs_steps;
    const std::size_t P = grid.pred_steps;
    if (s.target_obs.rows != O || s.target_obs.cols != 2)
        return "target observation must be " + std::to_string(O) + "x2";
    if (s.target_future.rows != P || s.target_future.cols != 2)
        return "target future must be " + std::to_string(P) + "x2";
    for (std::size_t j = 0; j < s.neighbor_obs.size(); ++j) {
        const Mat& m = s.neighbor_obs[j];
        if (m.rows != O || m.cols != 4)
            return "neighbor " + std::to_string(j) + " observation must be " +
                   std::to_string(O) + "x4";
        for (double v : m.data)
            if (!std::isfinite(v))
                return "non-finite value in neighbor " + std::to_string(j);
    }
    for (double v : s.target_obs.data)
        if (!std::isfinite(v)) return "non-finite value in target observation";
    for (double v : s.target_future.data)
        if (!std::isfinite(v)) return "non-finite value in target future";
    return "";
}

SplitResult split_dataset(const Dataset& ds, double train_fraction) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw UsageError("train fraction must lie strictly between 0 and 1");

    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(ds.split_seed);
    rng.shuffle(order);

    const std::size_t test_count = static_cast<std::size_t>(
        std::floor(static_cast<double>(ds.size()) * (1.0 - train_fraction)));
    const std::size_t train_count = ds.size() - test_count;

    SplitResult out;
    out.train.grid = ds.grid;
    out.train.split_seed = ds.split_seed;
    out.test.grid = ds.grid;
    out.test.split_seed = ds.split_seed;
    out.train.scenarios.reserve(train_count);
    out.test.scenarios.reserve(test_count);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i < train_count)
            out.train.scenarios.push_back(ds.scenarios[order[i]]);
        else
            out.test.scenarios.push_back(ds.scenarios[order[i]]);
    }
    return out;
}

double slot_lane_offset(std::size_t slot) {
    switch (slot) {
        case 0: case 3: case 5: return 4.0;
        case 1: case 6: return 0.0;
        default: return -4.0;
    }
}

double slot_gap_sign(std::size_t slot) { return slot >= 5 ? -1.0 : 1.0; }

void fill_absent_neighbor(Mat& obs, std::size_t slot) {
    const double gap = slot_gap_sign(slot) * kAbsentNeighborGap;
    const double lane = slot_lane_offset(slot);
    for (std::size_t r = 0; r < obs.rows; ++r) {
        obs(r, 0) = gap;
        obs(r, 1) = lane;
        obs(r, 2) = 0.0;
        obs(r, 3) = 0.0;
    }
}

}  // namespace dvae
