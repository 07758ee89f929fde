#include "stickylab/lattice_walk.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "stickylab/rng.hpp"

namespace stickylab {

namespace {
constexpr std::uint64_t kMaxStoredSteps = 1'000'000'000ull;
}

LatticeWalk simulate_walk(const WalkConfig& config) {
    if (!(config.spacing > 0.0))
        throw std::invalid_argument("simulate_walk: spacing must be positive");
    if (config.steps > kMaxStoredSteps)
        throw std::runtime_error("simulate_walk: steps " + std::to_string(config.steps) +
                                 " exceeds in-memory budget " + std::to_string(kMaxStoredSteps));
    LatticeWalk walk;
    walk.config = config;
    walk.positions.resize(config.steps + 1);
    walk.positions[0] = 0;
    walk.visit_counts[0] = 1;
    std::int64_t pos = 0;
    std::uint64_t word = 0;
    for (std::uint64_t i = 0; i < config.steps; ++i) {
        if ((i & 63u) == 0) word = philox_u64(config.seed, config.stream, i >> 6);
        pos += ((word >> (i & 63u)) & 1u) ? 1 : -1;
        walk.positions[i + 1] = pos;
        ++walk.visit_counts[pos];
    }
    return walk;
}

double local_time_at(const LatticeWalk& walk, double site, std::uint64_t upto_step) {
    if (upto_step >= walk.positions.size())
        throw std::out_of_range("local_time_at: step beyond walk length");
    double delta = walk.config.spacing;
    double k = (site - walk.config.origin) / delta;
    double kr = std::round(k);
    if (std::abs(k - kr) > 1e-9 * std::max(1.0, std::abs(k)))
        throw std::domain_error("local_time_at: site is not a lattice point");
    std::int64_t idx = static_cast<std::int64_t>(kr);
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i <= upto_step; ++i)
        if (walk.positions[i] == idx) ++count;
    return delta * static_cast<double>(count);
}

void dump_positions(const LatticeWalk& walk, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("dump_positions: cannot open " + path);
    for (std::int64_t p : walk.positions) {
        unsigned char buf[8];
        std::uint64_t u = static_cast<std::uint64_t>(p);
        for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(u >> (8 * b));
        if (std::fwrite(buf, 1, 8, f) != 8) {
            std::fclose(f);
            throw std::runtime_error("dump_positions: short write to " + path);
        }
    }
    std::fclose(f);
}

}  // namespace stickylab
