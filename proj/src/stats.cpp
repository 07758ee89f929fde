#include "stickylab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stickylab {

namespace {

// Neumaier's compensated sum: the result is independent of how callers
// partitioned the work, which the determinism guarantees rely on.
double neumaier_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

}  // namespace

MCEstimate mc_mean(const std::vector<double>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("mc_mean: need at least 2 samples, got " +
                                    std::to_string(samples.size()));
    MCEstimate e;
    e.n = samples.size();
    double n = static_cast<double>(e.n);
    e.mean = neumaier_sum(samples) / n;
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double d = samples[i] - e.mean;
        sq[i] = d * d;
    }
    e.variance = neumaier_sum(sq) / (n - 1.0);
    if (e.variance < 0.0) e.variance = 0.0;
    e.se = std::sqrt(e.variance / n);
    e.ci_half_width = 3.0 * e.se;
    return e;
}

namespace {

// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), the asymptotic
// survival function of the KS statistic.
double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    double q = 2.0 * sum;
    return std::clamp(q, 0.0, 1.0);
}

}  // namespace

KSResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 50 || b.size() < 50)
        throw std::invalid_argument("ks_two_sample: need at least 50 samples per side");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    KSResult r;
    r.n1 = a.size();
    r.n2 = b.size();
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    // Advance past all ties of the current value on both sides before
    // comparing, so the statistic is the true sup over right-continuous CDFs.
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    r.statistic = d;
    double n_eff = na * nb / (na + nb);
    r.p_value = kolmogorov_q(std::sqrt(n_eff) * d);
    return r;
}

namespace {

// True iff both empirical CDFs stay within the h-box of the other. It is
// enough to test at the jump points of each CDF: between jumps the CDFs are
// constant, so violations are extremal immediately after a jump.
bool levy_fits(const std::vector<double>& a, const std::vector<double>& b, double h) {
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        double fa = static_cast<double>(i + 1) / na;
        auto it = std::upper_bound(b.begin(), b.end(), a[i] + h);
        double fb = static_cast<double>(it - b.begin()) / nb;
        if (fa > fb + h) return false;
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        double fb = static_cast<double>(j + 1) / nb;
        auto it = std::upper_bound(a.begin(), a.end(), b[j] + h);
        double fa = static_cast<double>(it - a.begin()) / na;
        if (fb > fa + h) return false;
    }
    return true;
}

}  // namespace

double levy_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 50 || b.size() < 50)
        throw std::invalid_argument("levy_two_sample: need at least 50 samples per side");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // Feasibility is monotone in h, so bisect. h = 1 always fits.
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 60 && hi - lo > 1e-10; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (levy_fits(a, b, mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

ExitSummary exit_statistics(const std::vector<ExitSample>& samples, double censor_threshold) {
    if (samples.empty()) throw std::invalid_argument("exit_statistics: empty batch");
    ExitSummary s;
    s.n = samples.size();
    std::vector<double> times, at_zero, occ;
    times.reserve(samples.size());
    at_zero.reserve(samples.size());
    occ.reserve(samples.size());
    std::size_t left = 0, right = 0;
    for (const ExitSample& e : samples) {
        if (e.censored) {
            ++s.censored;
            continue;
        }
        if (e.side < 0) ++left;
        if (e.side > 0) ++right;
        times.push_back(e.exit_time);
        at_zero.push_back(e.time_at_zero);
        occ.push_back(e.occ_f);
    }
    double frac = static_cast<double>(s.censored) / static_cast<double>(s.n);
    if (frac > censor_threshold)
        throw std::runtime_error("exit_statistics: censored fraction " + std::to_string(frac) +
                                 " exceeds threshold " + std::to_string(censor_threshold));
    double done = static_cast<double>(times.size());
    s.exit_left_freq = static_cast<double>(left) / done;
    s.exit_right_freq = static_cast<double>(right) / done;
    s.mean_exit_time = mc_mean(times);
    s.mean_time_at_zero = mc_mean(at_zero);
    s.mean_occ_f = mc_mean(occ);
    return s;
}

}  // namespace stickylab
