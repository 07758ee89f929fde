#pragma once

#include <cstdint>
#include <vector>

#include "stickylab/kernels.hpp"
#include "stickylab/rng.hpp"
#include "stickylab/speed_measure.hpp"
#include "stickylab/stats.hpp"
#include "stickylab/time_change.hpp"

namespace stickylab {

/// Euler-Maruyama configuration for the band-regularized diffusion
/// dX = sigma_eps(X) dW with sigma_eps = 1 off [-eps,eps], sqrt(eps/gamma)
/// on it. The step rule h <= eps^2/25 keeps the spatial step sqrt(h) at most
/// eps/5, so the band is resolved and its occupation bias stays far below the
/// statistical tolerances.
struct RegConfig {
    double epsilon = 0.0;
    double gamma = 0.0;
    double step = 0.0;     // h
    double horizon = 0.0;  // model time; also the censoring limit for exits
    double x0 = 0.0;
    std::uint64_t seed = 0;
};

/// Throws std::domain_error / std::invalid_argument on violated invariants
/// (epsilon <= gamma, step <= epsilon^2/25, horizon >= step, positivity).
void validate(const RegConfig& cfg);

/// Exact piecewise coefficient; |x| == epsilon belongs to the band.
double sigma_eps(double epsilon, double gamma, double x);

/// One stored path on the uniform grid 0, h, 2h, ..., horizon.
/// Deterministic in (seed, path_index); draws come from the `regularized`
/// substream so the X leg of simulate_coupled reproduces it bitwise.
SamplePath simulate_reg(const RegConfig& cfg, std::uint64_t path_index = 0);

/// The coupled pair: X uses sigma_eps, Y uses sigma_{2 eps}, both legs consume
/// the identical increments sqrt(h) * xi_j. Requires 2 * epsilon <= gamma.
struct CoupledPath {
    std::vector<double> grid;
    std::vector<double> x_values;
    std::vector<double> y_values;
    std::vector<double> z_values;  // x - y, exactly
};

CoupledPath simulate_coupled(const RegConfig& cfg, std::uint64_t path_index = 0);

/// Streaming batch runs (paths never stored), SIMD kernels inside.
struct RegBatchConfig {
    RegConfig reg;
    std::uint64_t first_path = 0;
    std::uint64_t n_paths = 0;
    int workers = 1;
};

/// Path values at model time `horizon` for n_paths independent paths.
std::vector<double> reg_endpoint_batch(const RegBatchConfig& cfg);

/// Runs each path until it leaves I (grid-point reading; the crossing step is
/// attributed to the moment the grid value first lies outside the open
/// interval). time_at_zero records band occupation, h * #{steps with
/// |x| <= epsilon}, which doubles as the H functional in calibration pilots.
std::vector<ExitSample> reg_exit_batch(const RegBatchConfig& cfg, const Interval& I);

}  // namespace stickylab
