#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace stickylab {

/// Flat key-value run configuration: one `key = value` per line, `#` starts a
/// comment, blank lines ignored. CLI flags override file values.
class Config {
public:
    Config() = default;

    static Config load(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    int get_int(const std::string& key, int fallback) const;

    /// Reassembles the sub-config under `prefix.` with the prefix stripped,
    /// one `key = value` line each (used for embedded speed-measure specs).
    std::string section_text(const std::string& prefix) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace stickylab
