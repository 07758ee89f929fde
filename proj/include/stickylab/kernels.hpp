#pragma once

#include <cstddef>
#include <cstdint>

namespace stickylab {

/// Inverse normal CDF (Acklam's rational approximation, |rel err| < 1.2e-9).
/// The scalar reference for the batch transform below.
double inv_normal_cdf(double p);

/// Parameters of one Euler-Maruyama leg with a piecewise-constant diffusion
/// coefficient: step = sigma * sqrt(h), selected by |x| <= band_halfwidth.
struct LegParams {
    double band_halfwidth;  // eps (or 2*eps for the coupled Y leg)
    double band_step;       // sqrt(band_halfwidth/gamma * ... ) * sqrt(h), precomputed
    double free_step;       // sqrt(h)
};

/// Data-parallel inner loops. Scalar and AVX2 variants compute bitwise
/// identical results lane by lane; pick one via active_kernels().
struct Kernels {
    const char* name;

    // u[i] = uniform draw ctrs[i] of stream streams[i] under `seed`.
    void (*uniform_batch)(std::uint64_t seed, const std::uint64_t* streams,
                          const std::uint64_t* ctrs, double* u, std::size_t n);

    // z[i] = inv_normal_cdf(u[i])
    void (*normal_batch)(const double* u, double* z, std::size_t n);

    // x[i] += (|x[i]| <= band_halfwidth ? band_step : free_step) * xi[i]
    void (*em_step)(double* x, const double* xi, std::size_t n, LegParams leg);

    // Both legs consume the same increment; z[i] = x[i] - y[i] afterwards.
    void (*coupled_step)(double* x, double* y, double* z, const double* xi,
                         std::size_t n, LegParams leg_x, LegParams leg_y);
};

const Kernels& scalar_kernels();
const Kernels* avx2_kernels();  // nullptr when the CPU lacks AVX2

/// Runtime choice: STICKYLAB_KERNEL={scalar,avx2,auto}; auto prefers AVX2.
const Kernels& active_kernels();

}  // namespace stickylab
