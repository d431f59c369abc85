#include "dvae/canonical_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dvae/config_file.hpp"
#include "dvae/errors.hpp"

namespace dvae {

namespace {

struct HeaderFields {
    std::size_t O = 0, P = 0, N = 0;
    double dt = 0.0;
};

HeaderFields parse_header(const std::string& line, const std::string& path) {
    std::istringstream ss(line);
    std::string magic, version;
    ss >> magic >> version;
    if (magic != "DVAE-SCN" || version != "v1")
        throw DataError(path + ":1: not a DVAE-SCN v1 file");
    HeaderFields h;
    std::string kv;
    while (ss >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw DataError(path + ":1: malformed header field '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "O") h.O = std::stoull(value);
        else if (key == "P") h.P = std::stoull(value);
        else if (key == "N") h.N = std::stoull(value);
        else if (key == "dt") h.dt = parse_real(value, path + ":1 dt");
        else throw DataError(path + ":1: unknown header field '" + key + "'");
    }
    if (h.O == 0 || h.P == 0 || h.dt <= 0.0)
        throw DataError(path + ":1: header must set O, P and dt");
    return h;
}

// Parses a comma-separated row of exactly `expect` reals; errors carry the
// 1-based line number and column index.
void parse_row(const std::string& line, std::size_t lineno, std::size_t expect,
               const std::string& path, double* out) {
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
        const char* comma = p;
        while (comma < end && *comma != ',') ++comma;
        if (col >= expect)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(expect) + " columns, found more");
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(p, comma, v);
        if (ec != std::errc{} || ptr != comma)
            throw DataError(path + ":" + std::to_string(lineno) + ": column " +
                            std::to_string(col + 1) + ": malformed real");
        if (!std::isfinite(v))
            throw DataError(path + ":" + std::to_string(lineno) + ": column " +
                            std::to_string(col + 1) + ": non-finite value");
        out[col++] = v;
        if (comma == end) break;
        p = comma + 1;
    }
    if (col != expect)
        throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(expect) + " columns, found " + std::to_string(col));
}

Dataset load_impl(const std::string& path, const TimeGrid* expected_grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    const HeaderFields h = parse_header(line, path);

    TimeGrid grid = TimeGrid::from_counts(h.O, h.P, h.dt);
    if (expected_grid != nullptr) {
        if (!expected_grid->matches(grid))
            throw DataError(path + ": header grid O=" + std::to_string(h.O) + " P=" +
                            std::to_string(h.P) + " dt=" + format_real(h.dt) +
                            " does not match the expected grid");
        grid = *expected_grid;
    }

    Dataset ds;
    ds.grid = grid;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.rfind("#scenario", 0) != 0)
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": expected '#scenario' marker");
        std::istringstream ss(line);
        std::string marker, id, labelkv;
        ss >> marker >> id >> labelkv;
        if (labelkv.rfind("label=", 0) != 0)
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": scenario marker missing label=");
        const std::string label = labelkv.substr(6);

        Scenario s;
        s.target_obs = Mat(h.O, 2);
        s.neighbor_obs.assign(h.N, Mat(h.O, 4));
        s.target_future = Mat(h.P, 2);
        if (label != "?") s.label = maneuver_from_string(label);

        const std::size_t obs_cols = 2 + 4 * h.N;
        std::vector<double> row(obs_cols);
        for (std::size_t r = 0; r < h.O; ++r) {
            if (!std::getline(in, line))
                throw DataError(path + ": unexpected end of file in observation block");
            ++lineno;
            parse_row(line, lineno, obs_cols, path, row.data());
            s.target_obs(r, 0) = row[0];
            s.target_obs(r, 1) = row[1];
            for (std::size_t j = 0; j < h.N; ++j)
                for (std::size_t c = 0; c < 4; ++c)
                    s.neighbor_obs[j](r, c) = row[2 + 4 * j + c];
        }
        for (std::size_t r = 0; r < h.P; ++r) {
            if (!std::getline(in, line))
                throw DataError(path + ": unexpected end of file in future block");
            ++lineno;
            parse_row(line, lineno, 2, path, s.target_future.row(r));
        }
        ds.scenarios.push_back(std::move(s));
    }
    return ds;
}

}  // namespace

void write_canonical(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset: " + path);
    const std::size_t N = ds.scenarios.empty() ? kNeighborSlots
                                               : ds.scenarios.front().neighbor_obs.size();
    out << "DVAE-SCN v1 O=" << ds.grid.obs_steps << " P=" << ds.grid.pred_steps
        << " N=" << N << " dt=" << format_real(ds.grid.dt) << "\n";
    for (std::size_t idx = 0; idx < ds.scenarios.size(); ++idx) {
        const Scenario& s = ds.scenarios[idx];
        out << "#scenario " << idx << " label="
            << (s.label ? to_string(*s.label) : "?") << "\n";
        for (std::size_t r = 0; r < s.target_obs.rows; ++r) {
            out << format_real(s.target_obs(r, 0)) << ',' << format_real(s.target_obs(r, 1));
            for (const Mat& nb : s.neighbor_obs)
                for (std::size_t c = 0; c < 4; ++c) out << ',' << format_real(nb(r, c));
            out << "\n";
        }
        for (std::size_t r = 0; r < s.target_future.rows; ++r)
            out << format_real(s.target_future(r, 0)) << ','
                << format_real(s.target_future(r, 1)) << "\n";
    }
    if (!out) throw DataError("write failure on dataset: " + path);
}

Dataset load_canonical(const std::string& path, const TimeGrid& grid) {
    return load_impl(path, &grid);
}

Dataset load_canonical_any(const std::string& path) { return load_impl(path, nullptr); }

}  // namespace dvae
