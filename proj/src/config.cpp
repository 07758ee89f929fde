#include "stickylab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stickylab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not `key = value`");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key on line " + std::to_string(lineno));
        cfg.kv_[key] = value;
    }
    return cfg;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size())
        throw std::invalid_argument("config: key " + key + " is not a number: " + it->second);
    return v;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::size_t used = 0;
    unsigned long long v = std::stoull(it->second, &used);
    if (used != it->second.size())
        throw std::invalid_argument("config: key " + key + " is not an integer: " + it->second);
    return static_cast<std::uint64_t>(v);
}

int Config::get_int(const std::string& key, int fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::size_t used = 0;
    int v = std::stoi(it->second, &used);
    if (used != it->second.size())
        throw std::invalid_argument("config: key " + key + " is not an integer: " + it->second);
    return v;
}

std::string Config::section_text(const std::string& prefix) const {
    std::string out;
    std::string p = prefix + ".";
    for (const auto& [key, value] : kv_)
        if (key.rfind(p, 0) == 0) out += key.substr(p.size()) + " = " + value + "\n";
    return out;
}

}  // namespace stickylab
