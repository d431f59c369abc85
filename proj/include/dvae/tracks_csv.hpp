#pragma once

#include <string>

#include "dvae/config_file.hpp"
#include "dvae/scenario.hpp"

namespace dvae {

// Adapter for drone-recording style track CSVs (one row per vehicle per
// frame, global coordinates). The column map assigns source column names to
// the required fields:
//   frame=<col> id=<col> x=<col> y=<col> xVelocity=<col> yVelocity=<col>
//   laneId=<col>          (accepted, not required)
// plus adapter options in the same file:
//   stride=<frames>       window start spacing, default 25
//   flip_y=<bool>         negate lateral axis of the source (image-style
//                         coordinates), default false
//
// Sliding windows of O+P consecutive frames per vehicle are cut (vehicles
// with fewer frames contribute nothing) and transformed into the target
// frame: the frame origin rides on the target at each observation step for
// the neighbor rows, the future is expressed relative to the target pose at
// t_0, and recordings driving toward -x are rotated by pi so both highway
// directions share the x-forward / y-left convention. The frame rate is
// assumed to match the grid's dt.
Dataset adapt_tracks_csv(const std::string& path, const ConfigMap& column_map,
                         const TimeGrid& grid);

}  // namespace dvae
