#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dvae/rng.hpp"

namespace dvae {

struct ParamEntry {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;
    std::vector<double> grads;

    std::size_t size() const { return values.size(); }
};

// The complete named, shaped set of learnable parameters of one model,
// together with its gradient shadow. Entry iteration order is the
// registration order, which makes serialization and the SGD update
// deterministic.
class ParamStore {
public:
    ParamStore() = default;
    explicit ParamStore(std::uint64_t rng_seed) : rng_seed_(rng_seed) {}

    std::size_t add(const std::string& name, std::vector<std::size_t> shape);

    bool has(const std::string& name) const { return index_.count(name) != 0; }
    std::size_t index_of(const std::string& name) const;

    ParamEntry& entry(std::size_t i) { return entries_[i]; }
    const ParamEntry& entry(std::size_t i) const { return entries_[i]; }
    ParamEntry& entry(const std::string& name) { return entries_[index_of(name)]; }
    const ParamEntry& entry(const std::string& name) const { return entries_[index_of(name)]; }

    std::size_t entry_count() const { return entries_.size(); }
    std::size_t total_values() const;

    std::uint64_t rng_seed() const { return rng_seed_; }
    void set_rng_seed(std::uint64_t seed) { rng_seed_ = seed; }

    void zero_grads();
    void clip_grads(double magnitude);

    // theta <- theta - lr * grad, elementwise; grads are left untouched.
    // A non-finite gradient aborts with the offending parameter named.
    void sgd_step(double lr);

    // Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per entry.
    // fan_in is the trailing shape dimension for matrices; vectors (biases)
    // reuse the fan_in of their layer via init_entry.
    void init_entry(std::size_t i, double fan_in, Rng& rng);

    bool all_finite() const;

private:
    std::vector<ParamEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    std::uint64_t rng_seed_ = 0;
};

// Checkpoint container: text header (format version, model kind, seed and
// the entry names/shapes in order) followed by the concatenated values as
// 64-bit little-endian reals. Round-trips byte-exactly.
struct CheckpointHeader {
    std::string kind;
    std::uint64_t seed = 0;
};

void save_checkpoint(const ParamStore& store, const std::string& kind,
                     const std::string& path);

CheckpointHeader peek_checkpoint(const std::string& path);

// Loads into a store whose entries must already match the header's names
// and shapes in order (build the architecture first, then fill values).
CheckpointHeader load_checkpoint(ParamStore& store, const std::string& path);

}  // namespace dvae
