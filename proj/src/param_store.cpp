#include "dvae/param_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dvae/errors.hpp"

namespace dvae {

std::size_t ParamStore::add(const std::string& name, std::vector<std::size_t> shape) {
    if (index_.count(name)) throw ConfigError("duplicate parameter name: " + name);
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    if (n == 0) throw ConfigError("parameter " + name + " has an empty shape");
    ParamEntry e;
    e.name = name;
    e.shape = std::move(shape);
    e.values.assign(n, 0.0);
    e.grads.assign(n, 0.0);
    entries_.push_back(std::move(e));
    index_[name] = entries_.size() - 1;
    return entries_.size() - 1;
}

std::size_t ParamStore::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter name: " + name);
    return it->second;
}

std::size_t ParamStore::total_values() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.size();
    return n;
}

void ParamStore::zero_grads() {
    for (auto& e : entries_) std::fill(e.grads.begin(), e.grads.end(), 0.0);
}

void ParamStore::clip_grads(double magnitude) {
    if (magnitude <= 0.0) return;
    for (auto& e : entries_)
        for (double& g : e.grads) {
            if (g > magnitude) g = magnitude;
            else if (g < -magnitude) g = -magnitude;
        }
}

void ParamStore::sgd_step(double lr) {
    for (auto& e : entries_) {
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (!std::isfinite(e.grads[i]))
                throw NumericError("non-finite gradient in parameter " + e.name +
                                   " at index " + std::to_string(i));
            e.values[i] -= lr * e.grads[i];
        }
    }
}

void ParamStore::init_entry(std::size_t i, double fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(fan_in);
    for (double& v : entries_[i].values) v = rng.uniform(-bound, bound);
}

bool ParamStore::all_finite() const {
    for (const auto& e : entries_)
        for (double v : e.values)
            if (!std::isfinite(v)) return false;
    return true;
}

namespace {

void write_le_double(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(b, 8);
}

double read_le_double(std::istream& in) {
    char b[8];
    in.read(b, 8);
    if (!in) throw DataError("checkpoint truncated in value block");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return std::bit_cast<double>(bits);
}

struct ParsedHeader {
    CheckpointHeader meta;
    std::vector<std::pair<std::string, std::vector<std::size_t>>> entries;
};

ParsedHeader read_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line != "DVAE-CKPT v1")
        throw DataError(path + ": not a DVAE-CKPT v1 file");
    ParsedHeader h;
    std::size_t count = 0;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(in, line)) throw DataError(path + ": truncated header");
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError(path + ": malformed header line '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "kind") h.meta.kind = value;
        else if (key == "seed") h.meta.seed = std::stoull(value);
        else if (key == "entries") count = std::stoull(value);
        else throw DataError(path + ": unexpected header key '" + key + "'");
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw DataError(path + ": truncated entry list");
        std::istringstream ls(line);
        std::string name;
        ls >> name;
        std::vector<std::size_t> shape;
        std::size_t d;
        while (ls >> d) shape.push_back(d);
        if (name.empty() || shape.empty())
            throw DataError(path + ": malformed entry line '" + line + "'");
        h.entries.emplace_back(std::move(name), std::move(shape));
    }
    if (!std::getline(in, line) || line != "DATA")
        throw DataError(path + ": missing DATA marker");
    return h;
}

}  // namespace

void save_checkpoint(const ParamStore& store, const std::string& kind,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    out << "DVAE-CKPT v1\n";
    out << "kind=" << kind << "\n";
    out << "seed=" << store.rng_seed() << "\n";
    out << "entries=" << store.entry_count() << "\n";
    for (std::size_t i = 0; i < store.entry_count(); ++i) {
        const auto& e = store.entry(i);
        out << e.name;
        for (std::size_t d : e.shape) out << ' ' << d;
        out << "\n";
    }
    out << "DATA\n";
    for (std::size_t i = 0; i < store.entry_count(); ++i)
        for (double v : store.entry(i).values) write_le_double(out, v);
    if (!out) throw DataError("write failure on checkpoint: " + path);
}

CheckpointHeader peek_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    return read_header(in, path).meta;
}

CheckpointHeader load_checkpoint(ParamStore& store, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    const ParsedHeader h = read_header(in, path);
    if (h.entries.size() != store.entry_count())
        throw ConfigError(path + ": checkpoint has " + std::to_string(h.entries.size()) +
                          " entries, model expects " + std::to_string(store.entry_count()));
    for (std::size_t i = 0; i < store.entry_count(); ++i) {
        auto& e = store.entry(i);
        if (h.entries[i].first != e.name || h.entries[i].second != e.shape)
            throw ConfigError(path + ": entry mismatch at position " + std::to_string(i) +
                              " (checkpoint '" + h.entries[i].first + "', model '" + e.name + "')");
    }
    for (std::size_t i = 0; i < store.entry_count(); ++i) {
        auto& e = store.entry(i);
        for (double& v : e.values) v = read_le_double(in);
    }
    store.set_rng_seed(h.meta.seed);
    return h.meta;
}

}  // namespace dvae
