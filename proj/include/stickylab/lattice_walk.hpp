#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace stickylab {

/// Simple symmetric random walk on the lattice {origin + k*spacing}. One step
/// advances model time by spacing^2, so visit counts scaled by spacing
/// approximate Brownian local time.
struct WalkConfig {
    double spacing = 0.0;       // delta > 0
    std::uint64_t steps = 0;    // >= 1 for simulate_walk (0 allowed: trivial walk)
    double origin = 0.0;        // must be a lattice point (it defines the lattice)
    std::uint64_t seed = 0;     // master seed
    std::uint64_t stream = 0;   // substream id, see rng.hpp
};

struct LatticeWalk {
    WalkConfig config;
    /// Lattice indices relative to the origin; length steps + 1, starts at 0.
    std::vector<std::int64_t> positions;
    /// Arrivals per lattice index, including the arrival at step 0.
    std::unordered_map<std::int64_t, std::uint64_t> visit_counts;

    double position_at(std::size_t step) const {
        return config.origin + config.spacing * static_cast<double>(positions[step]);
    }
};

/// Deterministic in (seed, stream): step i consumes bit i%64 of draw i/64.
/// Throws std::runtime_error when steps exceeds the in-memory budget (1e9).
LatticeWalk simulate_walk(const WalkConfig& config);

/// spacing * (number of arrivals at `site` through step `upto_step`).
/// Throws std::domain_error if site is off-lattice (beyond 1e-9 relative
/// snap), std::out_of_range if upto_step > steps.
double local_time_at(const LatticeWalk& walk, double site, std::uint64_t upto_step);

/// Debug dump: little-endian signed 64-bit lattice indices, one per step.
void dump_positions(const LatticeWalk& walk, const std::string& path);

}  // namespace stickylab
