#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stickylab/lattice_walk.hpp"
#include "stickylab/speed_measure.hpp"
#include "stickylab/stats.hpp"

namespace stickylab {

/// The additive clock of the time change: alphas[k] is the model time
/// consumed by the first k walk steps,
///   alphas[k] = sum_{j<k} w(position_j),
/// where w(site) = spacing * m([site - spacing/2, site + spacing/2)) is the
/// measure of the site's lattice cell (density integrated exactly, atoms
/// assigned to the cell that contains them). The walk shows position_k during
/// the model-time interval [alphas[k], alphas[k+1]). With m = Lebesgue this
/// reduces to alphas[k] = k * spacing^2.
struct Clock {
    std::vector<double> alphas;  // length steps + 1, alphas[0] = 0
};

/// A process observed on a time grid. Output of both construction methods.
struct SamplePath {
    std::vector<double> grid;
    std::vector<double> values;
    std::string meta;
};

/// Throws std::domain_error when an atom of m is farther than spacing/2 from
/// every lattice point (equivalently, its cell assignment would move it).
Clock build_clock(const LatticeWalk& walk, const SpeedMeasure& m);

/// Largest k with alphas[k] <= t (right-continuous inverse on the step grid).
/// Throws std::out_of_range for t < 0 or t > alphas.back().
std::size_t invert_clock(const Clock& clock, double t);

/// X_t = x0 + W_{beta_t} realized on the walk: values[j] is the walk position
/// at step invert_clock(grid[j]). x0 must equal the walk's origin.
SamplePath sticky_path(const LatticeWalk& walk, const SpeedMeasure& m, double x0,
                       const std::vector<double>& grid);

/// Batch configuration shared by the streaming engines below. Paths are never
/// stored; each path i is generated from substream first_path + i, so results
/// are a pure function of (seed, path index) and invariant to worker count.
struct StickyEngineConfig {
    SpeedMeasure m = SpeedMeasure::lebesgue();
    double x0 = 0.0;
    double spacing = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t first_path = 0;
    std::uint64_t n_paths = 0;
    std::uint64_t max_steps = 50'000'000;  // per path; exceeded => censored
    int workers = 1;
};

/// Runs each path until it exits I (endpoints must be lattice points).
/// Records exit side, exit model time, model time spent at 0, and, when f is
/// provided, the pathwise integral of f(X_s) ds accumulated sitewise.
std::vector<ExitSample> run_sticky_exit(const StickyEngineConfig& cfg, const Interval& I,
                                        const std::function<double(double)>& f = {});

/// Value of each path at model time t (the position shown by the clock
/// interval containing t). NaN for censored paths (step budget exhausted).
std::vector<double> sample_sticky_endpoint(const StickyEngineConfig& cfg, double t);

/// Pathwise discretization statistics for the semimartingale identities, per
/// path run to model time t:
///  - on the uniform grid {0, dt, 2dt, ...}: qv_dev = |sum of squared
///    increments taken from nonzero grid values - model time off 0|, the
///    off-0 quadratic-variation defect;
///  - on the walk's own step grid: mart_abs = |sum of increments taken from
///    steps that start at 0| (the integral of 1_{X=0} dX).
struct IdentityStats {
    double qv_dev = 0.0;
    double time_off_zero = 0.0;
    double mart_abs = 0.0;
    bool censored = false;
};

std::vector<IdentityStats> run_identity_stats(const StickyEngineConfig& cfg, double t,
                                              double dt);

}  // namespace stickylab
