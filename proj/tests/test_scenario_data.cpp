#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dvae/canonical_io.hpp"
#include "dvae/descriptive_decoder.hpp"
#include "dvae/errors.hpp"
#include "dvae/models.hpp"
#include "dvae/synthetic.hpp"
#include "dvae/tracks_csv.hpp"
#include "test_util.hpp"

using namespace dvae;

namespace {

bool scenario_equal(const Scenario& a, const Scenario& b) {
    if (!(a.target_obs == b.target_obs) || !(a.target_future == b.target_future))
        return false;
    if (a.neighbor_obs.size() != b.neighbor_obs.size()) return false;
    for (std::size_t j = 0; j < a.neighbor_obs.size(); ++j)
        if (!(a.neighbor_obs[j] == b.neighbor_obs[j])) return false;
    return a.label == b.label;
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// Columns: frame,id,x,y,xVelocity,yVelocity,laneId
ConfigMap identity_column_map(std::size_t stride = 25) {
    ConfigMap m;
    m.set("frame", "frame");
    m.set("id", "id");
    m.set("x", "x");
    m.set("y", "y");
    m.set("xVelocity", "xVelocity");
    m.set("yVelocity", "yVelocity");
    m.set("laneId", "laneId");
    m.set_u64("stride", stride);
    return m;
}

struct CsvRow {
    long frame;
    long id;
    double x, y, vx, vy;
    int lane;
};

std::string csv_from(const std::vector<CsvRow>& rows) {
    std::string out = "frame,id,x,y,xVelocity,yVelocity,laneId\n";
    for (const CsvRow& r : rows) {
        out += std::to_string(r.frame) + "," + std::to_string(r.id) + "," +
               format_real(r.x) + "," + format_real(r.y) + "," + format_real(r.vx) + "," +
               format_real(r.vy) + "," + std::to_string(r.lane) + "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("canonical round trip preserves the dataset and the file bytes") {
    const TimeGrid grid = test::small_grid();
    GeneratorConfig cfg;
    cfg.count = 7;
    cfg.noise_sigma = 0.05;
    cfg.seed = 1234;
    const Dataset ds = generate_synthetic(cfg, grid);

    TempFile f1("canon_rt_1.scn"), f2("canon_rt_2.scn");
    write_canonical(ds, f1.path);
    const Dataset loaded = load_canonical(f1.path, grid);
    REQUIRE(loaded.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        CHECK(scenario_equal(ds.scenarios[i], loaded.scenarios[i]));

    write_canonical(loaded, f2.path);
    CHECK(test::read_file_bytes(f1.path) == test::read_file_bytes(f2.path));
}

TEST_CASE("canonical loader accepts an empty file with a valid header") {
    TempFile f("canon_empty.scn");
    write_text(f.path, "DVAE-SCN v1 O=6 P=10 N=8 dt=0.1\n");
    const Dataset ds = load_canonical(f.path, test::small_grid());
    CHECK(ds.size() == 0);
}

TEST_CASE("canonical loader names the line and column of a NaN value") {
    const TimeGrid grid = TimeGrid::from_counts(1, 1, 0.1);
    TempFile f("canon_nan.scn");
    write_text(f.path,
               "DVAE-SCN v1 O=1 P=1 N=1 dt=0.1\n"
               "#scenario 0 label=?\n"
               "1.0,nan,0,0,0,0\n"
               "0.1,0\n");
    try {
        load_canonical(f.path, grid);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3") != std::string::npos);
        CHECK(msg.find("column 2") != std::string::npos);
    }
}

TEST_CASE("canonical loader reports a wrong column count with the line number") {
    const TimeGrid grid = TimeGrid::from_counts(1, 1, 0.1);
    TempFile f("canon_cols.scn");
    write_text(f.path,
               "DVAE-SCN v1 O=1 P=1 N=1 dt=0.1\n"
               "#scenario 0 label=KL\n"
               "1.0,2.0,0,0\n"
               "0.1,0\n");
    try {
        load_canonical(f.path, grid);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3") != std::string::npos);
        CHECK(msg.find("6") != std::string::npos);
    }
}

TEST_CASE("canonical loader rejects a grid mismatch") {
    TempFile f("canon_grid.scn");
    write_text(f.path, "DVAE-SCN v1 O=5 P=10 N=8 dt=0.1\n");
    CHECK_THROWS_AS(load_canonical(f.path, test::small_grid()), DataError);
    CHECK(load_canonical_any(f.path).grid.obs_steps == 5);
}

TEST_CASE("noiseless synthetic scenarios satisfy their generating equations exactly") {
    const TimeGrid grid;
    GeneratorConfig cfg;
    cfg.count = 30;
    cfg.noise_sigma = 0.0;
    cfg.seed = 77;
    std::vector<SyntheticTruth> truth;
    const Dataset ds = generate_synthetic(cfg, grid, &truth);
    REQUIRE(truth.size() == ds.size());

    for (std::size_t m = 0; m < ds.size(); ++m) {
        const Scenario& s = ds.scenarios[m];
        const SyntheticTruth& t = truth[m];
        const auto xs = predict_longitudinal(t.a_x, t.v0x, grid);
        const auto ys = predict_lateral(t.lambda, t.mu, grid);
        for (std::size_t i = 0; i < grid.pred_steps; ++i) {
            CHECK(s.target_future(i, 0) == xs[i]);
            CHECK(s.target_future(i, 1) == ys[i]);
        }
        CHECK(s.label == t.label);
        // Most recent velocity row is (v0x, lateral curve slope at t=0).
        CHECK(s.last_vx() == t.v0x);
        CHECK(t.v0x >= gen_ranges::v0x_min);
        CHECK(t.v0x <= gen_ranges::v0x_max);
    }
}

TEST_CASE("generator balances classes exactly for an even mix") {
    const TimeGrid grid = test::small_grid();
    GeneratorConfig cfg;
    cfg.count = 3000;
    cfg.seed = 42;
    const Dataset ds = generate_synthetic(cfg, grid);
    std::size_t counts[3] = {0, 0, 0};
    for (const Scenario& s : ds.scenarios) ++counts[static_cast<std::size_t>(*s.label)];
    CHECK(counts[0] == 1000);
    CHECK(counts[1] == 1000);
    CHECK(counts[2] == 1000);
}

TEST_CASE("generator is bit-identical for a fixed seed") {
    const TimeGrid grid = test::small_grid();
    GeneratorConfig cfg;
    cfg.count = 40;
    cfg.noise_sigma = 0.1;
    cfg.seed = 9;
    const Dataset a = generate_synthetic(cfg, grid);
    const Dataset b = generate_synthetic(cfg, grid);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(scenario_equal(a.scenarios[i], b.scenarios[i]));
}

TEST_CASE("generator validates its inputs") {
    const TimeGrid grid = test::small_grid();
    GeneratorConfig cfg;
    cfg.count = 0;
    CHECK_THROWS_AS(generate_synthetic(cfg, grid), UsageError);
    cfg.count = 10;
    cfg.class_mix = {0.5, 0.2, 0.2};
    CHECK_THROWS_AS(generate_synthetic(cfg, grid), UsageError);
}

TEST_CASE("split follows the documented 2/3 arithmetic on 130000 scenarios") {
    Dataset ds;
    ds.grid = TimeGrid::from_counts(1, 1, 1.0);
    ds.split_seed = 5;
    Scenario tiny;
    tiny.target_obs = Mat(1, 2);
    tiny.target_future = Mat(1, 2);
    ds.scenarios.assign(130000, tiny);

    const SplitResult split = split_dataset(ds, 2.0 / 3.0);
    CHECK(split.train.size() == 86667);
    CHECK(split.test.size() == 43333);
}

TEST_CASE("split of an empty dataset yields two empty datasets") {
    Dataset ds;
    ds.grid = TimeGrid::from_counts(1, 1, 1.0);
    const SplitResult split = split_dataset(ds, 0.5);
    CHECK(split.train.size() == 0);
    CHECK(split.test.size() == 0);
}

TEST_CASE("split is disjoint, preserves the multiset and is seed-deterministic") {
    const TimeGrid grid = test::small_grid();
    GeneratorConfig cfg;
    cfg.count = 60;
    cfg.seed = 21;
    Dataset ds = generate_synthetic(cfg, grid);
    // Tag each scenario uniquely through an observation entry.
    for (std::size_t i = 0; i < ds.size(); ++i)
        ds.scenarios[i].target_obs(0, 0) = static_cast<double>(i);
    ds.split_seed = 99;

    const SplitResult a = split_dataset(ds, 2.0 / 3.0);
    const SplitResult b = split_dataset(ds, 2.0 / 3.0);
    CHECK(a.train.size() == 40);
    CHECK(a.test.size() == 20);

    std::vector<int> seen(ds.size(), 0);
    for (const Scenario& s : a.train.scenarios)
        ++seen[static_cast<std::size_t>(s.target_obs(0, 0))];
    for (const Scenario& s : a.test.scenarios)
        ++seen[static_cast<std::size_t>(s.target_obs(0, 0))];
    for (int count : seen) CHECK(count == 1);

    for (std::size_t i = 0; i < a.train.size(); ++i)
        CHECK(scenario_equal(a.train.scenarios[i], b.train.scenarios[i]));
}

TEST_CASE("adapter cuts a straight constant-velocity drive into a CV-exact scenario") {
    const TimeGrid grid = test::small_grid();  // O=6, P=10, dt=0.1
    const double v = 30.0;
    std::vector<CsvRow> rows;
    for (long k = 0; k < 30; ++k)
        rows.push_back({k, 1, 100.0 + v * 0.1 * static_cast<double>(k), 5.0, v, 0.0, 2});
    TempFile f("tracks_straight.csv");
    write_text(f.path, csv_from(rows));

    const Dataset ds = adapt_tracks_csv(f.path, identity_column_map(25), grid);
    REQUIRE(ds.size() >= 1);
    const Scenario& s = ds.scenarios[0];
    const Trajectory cv = cv_predict(v, 0.0, grid);
    for (std::size_t i = 0; i < grid.pred_steps; ++i) {
        CHECK(test::close(s.target_future(i, 0), cv.xs[i], 1e-9));
        CHECK(test::close(s.target_future(i, 1), cv.ys[i], 1e-9));
    }
    CHECK(s.last_vx() == v);
    CHECK_FALSE(s.label.has_value());
    // No other vehicles: all slots carry the absent sentinel.
    for (std::size_t slot = 0; slot < kNeighborSlots; ++slot) {
        CHECK(s.neighbor_obs[slot](0, 0) == slot_gap_sign(slot) * kAbsentNeighborGap);
        CHECK(s.neighbor_obs[slot](0, 1) == slot_lane_offset(slot));
    }
}

TEST_CASE("adapter skips vehicles one frame short of a window") {
    const TimeGrid grid = test::small_grid();
    std::vector<CsvRow> rows;
    const long frames = static_cast<long>(grid.obs_steps + grid.pred_steps) - 1;
    for (long k = 0; k < frames; ++k)
        rows.push_back({k, 1, 30.0 * 0.1 * static_cast<double>(k), 0.0, 30.0, 0.0, 2});
    TempFile f("tracks_short.csv");
    write_text(f.path, csv_from(rows));
    CHECK(adapt_tracks_csv(f.path, identity_column_map(1), grid).size() == 0);
}

TEST_CASE("adapter places a left-lane companion in a left slot with positive offsets") {
    const TimeGrid grid = test::small_grid();
    std::vector<CsvRow> rows;
    for (long k = 0; k < 30; ++k) {
        const double t = 0.1 * static_cast<double>(k);
        rows.push_back({k, 1, 100.0 + 30.0 * t, 0.0, 30.0, 0.0, 2});
        rows.push_back({k, 2, 120.0 + 28.0 * t, 4.0, 28.0, 0.0, 3});
    }
    TempFile f("tracks_pair.csv");
    write_text(f.path, csv_from(rows));

    const Dataset ds = adapt_tracks_csv(f.path, identity_column_map(25), grid);
    REQUIRE(ds.size() >= 1);
    const Scenario& s = ds.scenarios[0];
    // Front-left slot: positive lateral (left) and positive longitudinal.
    const Mat& nb = s.neighbor_obs[0];
    for (std::size_t k = 0; k < grid.obs_steps; ++k) {
        CHECK(nb(k, 1) == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(nb(k, 0) > 0.0);
        CHECK(nb(k, 2) == doctest::Approx(-2.0).epsilon(1e-12));
    }
}

TEST_CASE("a coincident phantom vehicle produces all-zero relative rows") {
    const TimeGrid grid = test::small_grid();
    std::vector<CsvRow> rows;
    for (long k = 0; k < 30; ++k) {
        const double t = 0.1 * static_cast<double>(k);
        rows.push_back({k, 1, 100.0 + 30.0 * t, 0.0, 30.0, 0.0, 2});
        rows.push_back({k, 7, 100.0 + 30.0 * t, 0.0, 30.0, 0.0, 2});
    }
    TempFile f("tracks_phantom.csv");
    write_text(f.path, csv_from(rows));

    const Dataset ds = adapt_tracks_csv(f.path, identity_column_map(25), grid);
    REQUIRE(ds.size() >= 1);
    bool found_zero_slot = false;
    for (const Mat& nb : ds.scenarios[0].neighbor_obs) {
        bool all_zero = true;
        for (double v : nb.data) all_zero = all_zero && v == 0.0;
        found_zero_slot = found_zero_slot || all_zero;
    }
    CHECK(found_zero_slot);
}

TEST_CASE("an opposite-direction left lane change still yields positive future y") {
    const TimeGrid grid = test::small_grid();
    std::vector<CsvRow> rows;
    // Driving toward -x; a lane change to the driver's left moves toward -y
    // in global coordinates.
    for (long k = 0; k < 30; ++k) {
        const double t = 0.1 * static_cast<double>(k);
        const double drift = 0.5 * t;
        rows.push_back({k, 1, 500.0 - 30.0 * t, 8.0 - drift, -30.0, -0.5, 5});
    }
    TempFile f("tracks_reverse.csv");
    write_text(f.path, csv_from(rows));

    const Dataset ds = adapt_tracks_csv(f.path, identity_column_map(25), grid);
    REQUIRE(ds.size() >= 1);
    const Scenario& s = ds.scenarios[0];
    CHECK(s.target_future(grid.pred_steps - 1, 1) > 0.0);
    CHECK(s.last_vx() == 30.0);
    CHECK(s.last_vy() == 0.5);
}

TEST_CASE("mirroring the scene across the lane axis negates every lateral quantity") {
    const TimeGrid grid = test::small_grid();
    std::vector<CsvRow> rows, mirrored;
    for (long k = 0; k < 30; ++k) {
        const double t = 0.1 * static_cast<double>(k);
        const double y = 0.2 * t;
        rows.push_back({k, 1, 100.0 + 30.0 * t, y, 30.0, 0.2, 2});
        rows.push_back({k, 2, 130.0 + 27.0 * t, 4.0, 27.0, 0.0, 3});
        mirrored.push_back({k, 1, 100.0 + 30.0 * t, -y, 30.0, -0.2, 2});
        mirrored.push_back({k, 2, 130.0 + 27.0 * t, -4.0, 27.0, 0.0, 3});
    }
    TempFile f1("tracks_mirror_a.csv"), f2("tracks_mirror_b.csv");
    write_text(f1.path, csv_from(rows));
    write_text(f2.path, csv_from(mirrored));

    const Dataset da = adapt_tracks_csv(f1.path, identity_column_map(25), grid);
    const Dataset db = adapt_tracks_csv(f2.path, identity_column_map(25), grid);
    REQUIRE(da.size() == db.size());
    REQUIRE(da.size() >= 1);
    const Scenario& a = da.scenarios[0];
    const Scenario& b = db.scenarios[0];

    for (std::size_t i = 0; i < grid.pred_steps; ++i) {
        CHECK(test::close(a.target_future(i, 0), b.target_future(i, 0), 1e-12));
        CHECK(test::close(a.target_future(i, 1), -b.target_future(i, 1), 1e-12));
    }
    for (std::size_t k = 0; k < grid.obs_steps; ++k)
        CHECK(test::close(a.target_obs(k, 1), -b.target_obs(k, 1), 1e-12));

    // Left/right slots swap under the mirror.
    const std::size_t mirror_slot[kNeighborSlots] = {2, 1, 0, 4, 3, 7, 6, 5};
    for (std::size_t slot = 0; slot < kNeighborSlots; ++slot) {
        const Mat& na = a.neighbor_obs[slot];
        const Mat& nb = b.neighbor_obs[mirror_slot[slot]];
        for (std::size_t k = 0; k < grid.obs_steps; ++k) {
            CHECK(test::close(na(k, 0), nb(k, 0), 1e-12));
            CHECK(test::close(na(k, 1), -nb(k, 1), 1e-12));
            CHECK(test::close(na(k, 2), nb(k, 2), 1e-12));
            CHECK(test::close(na(k, 3), -nb(k, 3), 1e-12));
        }
    }
}

TEST_CASE("the flip_y option mirrors image-style sources") {
    const TimeGrid grid = test::small_grid();
    std::vector<CsvRow> rows;
    for (long k = 0; k < 30; ++k) {
        const double t = 0.1 * static_cast<double>(k);
        rows.push_back({k, 1, 100.0 + 30.0 * t, 0.2 * t, 30.0, 0.2, 2});
    }
    TempFile f("tracks_flipy.csv");
    write_text(f.path, csv_from(rows));

    ConfigMap flipped = identity_column_map(25);
    flipped.set("flip_y", "true");
    const Dataset plain = adapt_tracks_csv(f.path, identity_column_map(25), grid);
    const Dataset flip = adapt_tracks_csv(f.path, flipped, grid);
    REQUIRE(plain.size() == flip.size());
    for (std::size_t i = 0; i < grid.pred_steps; ++i)
        CHECK(test::close(plain.scenarios[0].target_future(i, 1),
                          -flip.scenarios[0].target_future(i, 1), 1e-12));
}

TEST_CASE("adapter rejects a missing mapped column") {
    const TimeGrid grid = test::small_grid();
    TempFile f("tracks_badmap.csv");
    write_text(f.path, "frame,id,x,y,xVelocity,yVelocity,laneId\n");
    ConfigMap map = identity_column_map();
    map.set("xVelocity", "speedX");
    CHECK_THROWS_AS(adapt_tracks_csv(f.path, map, grid), ConfigError);
}

TEST_CASE("validate_scenario reports dimension and finiteness problems") {
    const TimeGrid grid = test::small_grid();
    Rng rng(1);
    Scenario s = test::random_scenario(rng, grid);
    CHECK(validate_scenario(s, grid).empty());
    s.target_obs(0, 0) = std::nan("");
    CHECK_FALSE(validate_scenario(s, grid).empty());
    s = test::random_scenario(rng, grid);
    s.target_future = Mat(3, 2);
    CHECK_FALSE(validate_scenario(s, grid).empty());
}
