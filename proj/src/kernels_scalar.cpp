#include <cmath>

#include "stickylab/kernels.hpp"
#include "stickylab/rng.hpp"

namespace stickylab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    std::uint32_t n0 = hi1 ^ c[1] ^ k0;
    std::uint32_t n1 = lo1;
    std::uint32_t n2 = hi0 ^ c[3] ^ k1;
    std::uint32_t n3 = lo0;
    c[0] = n0;
    c[1] = n1;
    c[2] = n2;
    c[3] = n3;
}

}  // namespace

void Philox4x32::block(const std::uint32_t ctr[4], const std::uint32_t key[2],
                       std::uint32_t out[4]) {
    std::uint32_t c[4] = {ctr[0], ctr[1], ctr[2], ctr[3]};
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int r = 0; r < 10; ++r) {
        philox_round(c, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    out[0] = c[0];
    out[1] = c[1];
    out[2] = c[2];
    out[3] = c[3];
}

std::uint64_t philox_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
    std::uint32_t c[4] = {static_cast<std::uint32_t>(ctr), static_cast<std::uint32_t>(ctr >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
    std::uint32_t k[2] = {static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32)};
    std::uint32_t out[4];
    Philox4x32::block(c, k, out);
    return static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
}

namespace detail {

// Acklam's coefficients.
constexpr double kA[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                          -2.759285104469687e+02, 1.383577518672690e+02,
                          -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                          -1.556989798598866e+02, 6.680131188771972e+01,
                          -1.328068155288572e+01};
constexpr double kC[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                          -2.400758277161838e+00, -2.549732539343734e+00,
                          4.374664141464968e+00,  2.938163982698783e+00};
constexpr double kD[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                          2.445134137142996e+00, 3.754408661907416e+00};
constexpr double kPLow = 0.02425;

// Central branch, valid for p in [kPLow, 1-kPLow]. The vector variant runs the
// exact same operation sequence lane-wise.
inline double inv_normal_central(double p) {
    double q = p - 0.5;
    double r = q * q;
    double num = (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q;
    double den = ((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0;
    return num / den;
}

double inv_normal_tail(double p) {
    if (p < kPLow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
               ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
    }
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -((((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
             ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0));
}

}  // namespace detail

double inv_normal_cdf(double p) {
    if (p >= detail::kPLow && p <= 1.0 - detail::kPLow) return detail::inv_normal_central(p);
    return detail::inv_normal_tail(p);
}

double StreamRng::normal() { return inv_normal_cdf(uniform()); }

namespace {

void uniform_batch_scalar(std::uint64_t seed, const std::uint64_t* streams,
                          const std::uint64_t* ctrs, double* u, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) u[i] = philox_uniform(seed, streams[i], ctrs[i]);
}

void normal_batch_scalar(const double* u, double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_normal_cdf(u[i]);
}

void em_step_scalar(double* x, const double* xi, std::size_t n, LegParams leg) {
    for (std::size_t i = 0; i < n; ++i) {
        double step = std::abs(x[i]) <= leg.band_halfwidth ? leg.band_step : leg.free_step;
        x[i] = x[i] + step * xi[i];
    }
}

void coupled_step_scalar(double* x, double* y, double* z, const double* xi, std::size_t n,
                         LegParams leg_x, LegParams leg_y) {
    for (std::size_t i = 0; i < n; ++i) {
        double sx = std::abs(x[i]) <= leg_x.band_halfwidth ? leg_x.band_step : leg_x.free_step;
        double sy = std::abs(y[i]) <= leg_y.band_halfwidth ? leg_y.band_step : leg_y.free_step;
        x[i] = x[i] + sx * xi[i];
        y[i] = y[i] + sy * xi[i];
        z[i] = x[i] - y[i];
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{"scalar", uniform_batch_scalar, normal_batch_scalar,
                           em_step_scalar, coupled_step_scalar};
    return k;
}

}  // namespace stickylab
