#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dvae/mat.hpp"
#include "dvae/time_grid.hpp"
#include "dvae/types.hpp"

namespace dvae {

// One training/test sample. The observation window carries the target's
// absolute velocities (O x 2) and, per neighbor slot, relative positions and
// velocities (O x 4) in the target-fixed frame (x forward, y to the left).
// The future trajectory is expressed relative to the target pose at t_0.
//
// Neighbor slots are positional, indexed 0..7:
//   0 front-left   1 front   2 front-right
//   3 left                    4 right
//   5 rear-left    6 rear    7 rear-right
// An absent slot holds the constant sentinel row (+-200 m longitudinal
// offset away from the target, slot lane offset lateral, zero relative
// velocity).
struct Scenario {
    Mat target_obs;                 // O x 2: v_x_abs, v_y_abs
    std::vector<Mat> neighbor_obs;  // N slots, each O x 4: x_rel, y_rel, vx_rel, vy_rel
    Mat target_future;              // P x 2: x, y
    std::optional<Maneuver> label;

    // Most recent velocity information before the prediction.
    double last_vx() const { return target_obs(target_obs.rows - 1, 0); }
    double last_vy() const { return target_obs(target_obs.rows - 1, 1); }
};

// Validates dimensions against a grid and finiteness of every entry.
// Returns an empty string when valid, else a description of the first
// problem found.
std::string validate_scenario(const Scenario& s, const TimeGrid& grid);

struct Dataset {
    std::vector<Scenario> scenarios;
    TimeGrid grid;
    std::uint64_t split_seed = 0;

    std::size_t size() const { return scenarios.size(); }
};

// Seeded shuffle then split. The test-side count is floored, so the train
// side receives the remainder (130000 at 2/3 -> 86667/43333).
struct SplitResult {
    Dataset train;
    Dataset test;
};

SplitResult split_dataset(const Dataset& ds, double train_fraction);

inline constexpr double kAbsentNeighborGap = 200.0;

// Sentinel observation row for an absent neighbor slot.
void fill_absent_neighbor(Mat& obs, std::size_t slot);

// Lane offset convention used by slots: left lane +4 m, same lane 0,
// right lane -4 m.
double slot_lane_offset(std::size_t slot);

// Longitudinal sign of the sentinel gap for a slot (+1 front/alongside
// rows, -1 rear row).
double slot_gap_sign(std::size_t slot);

}  // namespace dvae
