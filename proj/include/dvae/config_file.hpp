#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace dvae {

// key=value configuration files: one pair per line, '#' starts a comment,
// whitespace around keys and values is trimmed. Used for adapter column
// maps, classifier thresholds, watchdog rule sets and resolved run configs.
class ConfigMap {
public:
    ConfigMap() = default;

    static ConfigMap load(const std::string& path);
    static ConfigMap parse(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set_double(const std::string& key, double value);
    void set_u64(const std::string& key, std::uint64_t value);

    // Deterministic serialization: keys in lexicographic order.
    std::string serialize() const;
    void save(const std::string& path) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Shortest round-trip decimal representation of a double. All text outputs
// (canonical datasets, CSVs, configs) use this so reruns are byte-identical.
std::string format_real(double v);

double parse_real(const std::string& s, const std::string& context);

}  // namespace dvae
