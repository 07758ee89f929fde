// AVX2 variants of the inner loops. Every lane executes the same IEEE
// operation sequence as the scalar reference, so results are bitwise equal;
// tests/test_kernels.cpp enforces that.

#include "stickylab/kernels.hpp"
#include "stickylab/rng.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace stickylab {

namespace detail {
double inv_normal_tail(double p);
}  // namespace detail

namespace {

constexpr double kA[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                          -2.759285104469687e+02, 1.383577518672690e+02,
                          -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                          -1.556989798598866e+02, 6.680131188771972e+01,
                          -1.328068155288572e+01};
constexpr double kPLow = 0.02425;

__attribute__((target("avx2"))) inline __m256i mul_lo32(__m256i a, std::uint32_t m) {
    return _mm256_mul_epu32(a, _mm256_set1_epi64x(m));
}

// Four independent Philox4x32-10 streams; each 64-bit lane carries one
// 32-bit counter/key word in its low half.
__attribute__((target("avx2"))) void philox4_u64(std::uint64_t seed,
                                                 const std::uint64_t* streams,
                                                 const std::uint64_t* ctrs,
                                                 std::uint64_t out[4]) {
    const __m256i lo32 = _mm256_set1_epi64x(0xFFFFFFFFll);
    __m256i c0 = _mm256_set_epi64x(static_cast<std::uint32_t>(ctrs[3]),
                                   static_cast<std::uint32_t>(ctrs[2]),
                                   static_cast<std::uint32_t>(ctrs[1]),
                                   static_cast<std::uint32_t>(ctrs[0]));
    __m256i c1 = _mm256_set_epi64x(static_cast<std::uint32_t>(ctrs[3] >> 32),
                                   static_cast<std::uint32_t>(ctrs[2] >> 32),
                                   static_cast<std::uint32_t>(ctrs[1] >> 32),
                                   static_cast<std::uint32_t>(ctrs[0] >> 32));
    __m256i c2 = _mm256_set_epi64x(static_cast<std::uint32_t>(streams[3]),
                                   static_cast<std::uint32_t>(streams[2]),
                                   static_cast<std::uint32_t>(streams[1]),
                                   static_cast<std::uint32_t>(streams[0]));
    __m256i c3 = _mm256_set_epi64x(static_cast<std::uint32_t>(streams[3] >> 32),
                                   static_cast<std::uint32_t>(streams[2] >> 32),
                                   static_cast<std::uint32_t>(streams[1] >> 32),
                                   static_cast<std::uint32_t>(streams[0] >> 32));
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int r = 0; r < 10; ++r) {
        __m256i p0 = mul_lo32(c0, 0xD2511F53u);
        __m256i p1 = mul_lo32(c2, 0xCD9E8D57u);
        __m256i hi0 = _mm256_srli_epi64(p0, 32);
        __m256i lo0 = _mm256_and_si256(p0, lo32);
        __m256i hi1 = _mm256_srli_epi64(p1, 32);
        __m256i lo1 = _mm256_and_si256(p1, lo32);
        __m256i k0v = _mm256_set1_epi64x(k0);
        __m256i k1v = _mm256_set1_epi64x(k1);
        __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0v);
        __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1v);
        c0 = n0;
        c1 = lo1;
        c2 = n2;
        c3 = lo0;
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    __m256i u = _mm256_or_si256(c0, _mm256_slli_epi64(c1, 32));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out), u);
}

// Exact small (< 2^53) integer -> double, same value as the scalar cast.
__attribute__((target("avx2"))) inline __m256d u53_to_pd(__m256i v53) {
    const __m256i lo32 = _mm256_set1_epi64x(0xFFFFFFFFll);
    const __m256d magic = _mm256_set1_pd(0x1.0p52);
    __m256i lo = _mm256_and_si256(v53, lo32);
    __m256i hi = _mm256_srli_epi64(v53, 32);
    __m256d lod = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(lo, _mm256_castpd_si256(magic))), magic);
    __m256d hid = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(hi, _mm256_castpd_si256(magic))), magic);
    return _mm256_add_pd(_mm256_mul_pd(hid, _mm256_set1_pd(0x1.0p32)), lod);
}

__attribute__((target("avx2"))) void uniform_batch_avx2(std::uint64_t seed,
                                                        const std::uint64_t* streams,
                                                        const std::uint64_t* ctrs, double* u,
                                                        std::size_t n) {
    std::size_t i = 0;
    alignas(32) std::uint64_t bits[4];
    for (; i + 4 <= n; i += 4) {
        philox4_u64(seed, streams + i, ctrs + i, bits);
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits));
        __m256d d = u53_to_pd(_mm256_srli_epi64(v, 12));
        __m256d r = _mm256_mul_pd(_mm256_add_pd(d, _mm256_set1_pd(0.5)),
                                  _mm256_set1_pd(0x1.0p-52));
        _mm256_storeu_pd(u + i, r);
    }
    for (; i < n; ++i) u[i] = philox_uniform(seed, streams[i], ctrs[i]);
}

__attribute__((target("avx2"))) void normal_batch_avx2(const double* u, double* z,
                                                       std::size_t n) {
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_loadu_pd(u + i);
        __m256d q = _mm256_sub_pd(p, half);
        __m256d r = _mm256_mul_pd(q, q);
        __m256d num = _mm256_set1_pd(kA[0]);
        num = _mm256_add_pd(_mm256_mul_pd(num, r), _mm256_set1_pd(kA[1]));
        num = _mm256_add_pd(_mm256_mul_pd(num, r), _mm256_set1_pd(kA[2]));
        num = _mm256_add_pd(_mm256_mul_pd(num, r), _mm256_set1_pd(kA[3]));
        num = _mm256_add_pd(_mm256_mul_pd(num, r), _mm256_set1_pd(kA[4]));
        num = _mm256_add_pd(_mm256_mul_pd(num, r), _mm256_set1_pd(kA[5]));
        num = _mm256_mul_pd(num, q);
        __m256d den = _mm256_set1_pd(kB[0]);
        den = _mm256_add_pd(_mm256_mul_pd(den, r), _mm256_set1_pd(kB[1]));
        den = _mm256_add_pd(_mm256_mul_pd(den, r), _mm256_set1_pd(kB[2]));
        den = _mm256_add_pd(_mm256_mul_pd(den, r), _mm256_set1_pd(kB[3]));
        den = _mm256_add_pd(_mm256_mul_pd(den, r), _mm256_set1_pd(kB[4]));
        den = _mm256_add_pd(_mm256_mul_pd(den, r), one);
        __m256d central = _mm256_div_pd(num, den);
        _mm256_storeu_pd(z + i, central);
        // Tail lanes (p < 0.02425 or p > 0.97575) fall back to the scalar path.
        __m256d lo = _mm256_cmp_pd(p, _mm256_set1_pd(kPLow), _CMP_LT_OQ);
        __m256d hi = _mm256_cmp_pd(p, _mm256_set1_pd(1.0 - kPLow), _CMP_GT_OQ);
        int mask = _mm256_movemask_pd(_mm256_or_pd(lo, hi));
        while (mask) {
            int lane = __builtin_ctz(static_cast<unsigned>(mask));
            z[i + static_cast<std::size_t>(lane)] =
                detail::inv_normal_tail(u[i + static_cast<std::size_t>(lane)]);
            mask &= mask - 1;
        }
    }
    for (; i < n; ++i) z[i] = inv_normal_cdf(u[i]);
}

__attribute__((target("avx2"))) inline __m256d abs_pd(__m256d x) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

__attribute__((target("avx2"))) inline __m256d leg_step(__m256d x, LegParams leg) {
    __m256d in_band =
        _mm256_cmp_pd(abs_pd(x), _mm256_set1_pd(leg.band_halfwidth), _CMP_LE_OQ);
    return _mm256_blendv_pd(_mm256_set1_pd(leg.free_step),
                            _mm256_set1_pd(leg.band_step), in_band);
}

__attribute__((target("avx2"))) void em_step_avx2(double* x, const double* xi,
                                                  std::size_t n, LegParams leg) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_loadu_pd(x + i);
        __m256d inc = _mm256_mul_pd(leg_step(xv, leg), _mm256_loadu_pd(xi + i));
        _mm256_storeu_pd(x + i, _mm256_add_pd(xv, inc));
    }
    for (; i < n; ++i) {
        double step = std::abs(x[i]) <= leg.band_halfwidth ? leg.band_step : leg.free_step;
        x[i] = x[i] + step * xi[i];
    }
}

__attribute__((target("avx2"))) void coupled_step_avx2(double* x, double* y, double* z,
                                                       const double* xi, std::size_t n,
                                                       LegParams leg_x, LegParams leg_y) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_loadu_pd(x + i);
        __m256d yv = _mm256_loadu_pd(y + i);
        __m256d w = _mm256_loadu_pd(xi + i);
        xv = _mm256_add_pd(xv, _mm256_mul_pd(leg_step(xv, leg_x), w));
        yv = _mm256_add_pd(yv, _mm256_mul_pd(leg_step(yv, leg_y), w));
        _mm256_storeu_pd(x + i, xv);
        _mm256_storeu_pd(y + i, yv);
        _mm256_storeu_pd(z + i, _mm256_sub_pd(xv, yv));
    }
    for (; i < n; ++i) {
        double sx = std::abs(x[i]) <= leg_x.band_halfwidth ? leg_x.band_step : leg_x.free_step;
        double sy = std::abs(y[i]) <= leg_y.band_halfwidth ? leg_y.band_step : leg_y.free_step;
        x[i] = x[i] + sx * xi[i];
        y[i] = y[i] + sy * xi[i];
        z[i] = x[i] - y[i];
    }
}

}  // namespace

const Kernels* avx2_kernels() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const Kernels k{"avx2", uniform_batch_avx2, normal_batch_avx2, em_step_avx2,
                           coupled_step_avx2};
    return &k;
}

}  // namespace stickylab

#else

namespace stickylab {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace stickylab

#endif
