#include "dvae/tracks_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>
#include <vector>

#include "dvae/errors.hpp"

namespace dvae {

namespace {

struct TrackPoint {
    std::int64_t frame = 0;
    double x = 0.0, y = 0.0, vx = 0.0, vy = 0.0;
};

struct VehicleTrack {
    std::int64_t first_frame = 0;
    std::vector<TrackPoint> points;  // consecutive frames from first_frame

    const TrackPoint* at_frame(std::int64_t frame) const {
        if (frame < first_frame) return nullptr;
        const std::size_t idx = static_cast<std::size_t>(frame - first_frame);
        if (idx >= points.size()) return nullptr;
        return &points[idx];
    }
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
        out.back().pop_back();
    return out;
}

double parse_field(const std::string& s, const std::string& path, std::size_t lineno) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw DataError(path + ":" + std::to_string(lineno) + ": malformed value '" + s + "'");
    return v;
}

// Positional slot layout, see scenario.hpp. lane: +1 left, 0 same, -1
// right; zone: +1 front, 0 alongside, -1 rear.
int slot_for(int lane, int zone) {
    if (zone > 0) return lane > 0 ? 0 : (lane == 0 ? 1 : 2);
    if (zone == 0) return lane > 0 ? 3 : 4;
    return lane > 0 ? 5 : (lane == 0 ? 6 : 7);
}

}  // namespace

Dataset adapt_tracks_csv(const std::string& path, const ConfigMap& column_map,
                         const TimeGrid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open tracks csv: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    const std::vector<std::string> header = split_csv_line(line);
    auto column_index = [&](const std::string& field) {
        const std::string& name = column_map.get(field);
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ConfigError(path + ": mapped column '" + name + "' for field '" + field +
                          "' not found in header");
    };
    const std::size_t col_frame = column_index("frame");
    const std::size_t col_id = column_index("id");
    const std::size_t col_x = column_index("x");
    const std::size_t col_y = column_index("y");
    const std::size_t col_vx = column_index("xVelocity");
    const std::size_t col_vy = column_index("yVelocity");

    const std::size_t stride = static_cast<std::size_t>(column_map.get_u64_or("stride", 25));
    const bool flip_y = column_map.get_bool_or("flip_y", false);
    const double lane_threshold = column_map.get_double_or("lane_threshold", 2.0);
    const double alongside_threshold = column_map.get_double_or("alongside_threshold", 6.0);
    if (stride == 0) throw ConfigError("stride must be positive");

    // Collect rows per vehicle; frames may arrive unsorted.
    std::map<std::int64_t, std::vector<TrackPoint>> raw;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        const std::size_t needed =
            std::max({col_frame, col_id, col_x, col_y, col_vx, col_vy});
        if (fields.size() <= needed)
            throw DataError(path + ":" + std::to_string(lineno) + ": too few columns");
        TrackPoint p;
        p.frame = static_cast<std::int64_t>(parse_field(fields[col_frame], path, lineno));
        const auto id = static_cast<std::int64_t>(parse_field(fields[col_id], path, lineno));
        p.x = parse_field(fields[col_x], path, lineno);
        p.y = parse_field(fields[col_y], path, lineno);
        p.vx = parse_field(fields[col_vx], path, lineno);
        p.vy = parse_field(fields[col_vy], path, lineno);
        if (flip_y) {
            p.y = -p.y;
            p.vy = -p.vy;
        }
        raw[id].push_back(p);
    }

    // Break each vehicle's rows into maximal consecutive-frame tracks.
    std::map<std::int64_t, std::vector<VehicleTrack>> tracks;
    for (auto& [id, points] : raw) {
        std::sort(points.begin(), points.end(),
                  [](const TrackPoint& a, const TrackPoint& b) { return a.frame < b.frame; });
        VehicleTrack current;
        for (const TrackPoint& p : points) {
            if (current.points.empty()) {
                current.first_frame = p.frame;
            } else if (p.frame != current.first_frame +
                                      static_cast<std::int64_t>(current.points.size())) {
                tracks[id].push_back(std::move(current));
                current = VehicleTrack{};
                current.first_frame = p.frame;
            }
            current.points.push_back(p);
        }
        if (!current.points.empty()) tracks[id].push_back(std::move(current));
    }

    const std::size_t O = grid.obs_steps;
    const std::size_t P = grid.pred_steps;
    const std::size_t window = O + P;

    Dataset ds;
    ds.grid = grid;

    for (const auto& [target_id, target_tracks] : tracks) {
        for (const VehicleTrack& track : target_tracks) {
            if (track.points.size() < window) continue;
            for (std::size_t start = 0; start + window <= track.points.size();
                 start += stride) {
                const std::size_t t0_idx = start + O - 1;
                const TrackPoint& t0 = track.points[t0_idx];

                // Direction convention: rotate opposite-direction drives by
                // pi so x runs forward and y to the left for every target.
                double mean_vx = 0.0;
                for (std::size_t k = 0; k < O; ++k) mean_vx += track.points[start + k].vx;
                const double f = mean_vx < 0.0 ? -1.0 : 1.0;

                Scenario s;
                s.target_obs = Mat(O, 2);
                for (std::size_t k = 0; k < O; ++k) {
                    const TrackPoint& p = track.points[start + k];
                    s.target_obs(k, 0) = f * p.vx;
                    s.target_obs(k, 1) = f * p.vy;
                }

                s.target_future = Mat(P, 2);
                for (std::size_t i = 0; i < P; ++i) {
                    const TrackPoint& p = track.points[t0_idx + 1 + i];
                    s.target_future(i, 0) = f * (p.x - t0.x);
                    s.target_future(i, 1) = f * (p.y - t0.y);
                }

                // Assign the nearest qualifying vehicle per positional slot;
                // a neighbor must cover the whole observation window.
                struct Candidate {
                    const VehicleTrack* track = nullptr;
                    double abs_dx = 0.0;
                };
                std::array<Candidate, kNeighborSlots> slots{};
                const std::int64_t obs_first = track.first_frame +
                                               static_cast<std::int64_t>(start);
                const std::int64_t frame_t0 = obs_first + static_cast<std::int64_t>(O - 1);
                for (const auto& [other_id, other_tracks] : tracks) {
                    if (other_id == target_id) continue;
                    for (const VehicleTrack& ot : other_tracks) {
                        const TrackPoint* at0 = ot.at_frame(frame_t0);
                        if (at0 == nullptr || ot.at_frame(obs_first) == nullptr) continue;
                        const double dx = f * (at0->x - t0.x);
                        const double dy = f * (at0->y - t0.y);
                        int lane = 0;
                        if (dy > lane_threshold) lane = 1;
                        else if (dy < -lane_threshold) lane = -1;
                        int zone;
                        if (dx > alongside_threshold) zone = 1;
                        else if (dx < -alongside_threshold) zone = -1;
                        else zone = lane == 0 ? (dx >= 0.0 ? 1 : -1) : 0;
                        const int slot = slot_for(lane, zone);
                        Candidate& c = slots[static_cast<std::size_t>(slot)];
                        if (c.track == nullptr || std::fabs(dx) < c.abs_dx) {
                            c.track = &ot;
                            c.abs_dx = std::fabs(dx);
                        }
                    }
                }

                s.neighbor_obs.assign(kNeighborSlots, Mat(O, 4));
                for (std::size_t slot = 0; slot < kNeighborSlots; ++slot) {
                    Mat& obs = s.neighbor_obs[slot];
                    const VehicleTrack* nb = slots[slot].track;
                    if (nb == nullptr) {
                        fill_absent_neighbor(obs, slot);
                        continue;
                    }
                    for (std::size_t k = 0; k < O; ++k) {
                        const TrackPoint& tp = track.points[start + k];
                        const TrackPoint* np =
                            nb->at_frame(obs_first + static_cast<std::int64_t>(k));
                        obs(k, 0) = f * (np->x - tp.x);
                        obs(k, 1) = f * (np->y - tp.y);
                        obs(k, 2) = f * (np->vx - tp.vx);
                        obs(k, 3) = f * (np->vy - tp.vy);
                    }
                }
                ds.scenarios.push_back(std::move(s));
            }
        }
    }
    return ds;
}

}  // namespace dvae
