#pragma once

#include <cstddef>
#include <vector>

#include "stickylab/speed_measure.hpp"

namespace stickylab {

/// Sample mean with a fixed z=3 confidence half-width. All acceptance gates
/// use 3 standard errors so the family-wise false-alarm rate stays small.
struct MCEstimate {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double se = 0.0;
    double ci_half_width = 0.0;  // 3 * se
};

/// Deterministic (fixed-order, compensated) mean; permutation differences stay
/// below 1e-12 relative. Throws std::invalid_argument for n < 2.
MCEstimate mc_mean(const std::vector<double>& samples);

struct KSResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0, n2 = 0;
};

/// Two-sample Kolmogorov-Smirnov: exact sup-CDF distance (ties handled by
/// comparing both empirical CDFs at every data point), asymptotic p-value from
/// the Kolmogorov distribution at effective size n1*n2/(n1+n2).
/// Requires n1, n2 >= 50.
KSResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Two-sample Levy metric: the smallest h such that each empirical CDF fits
/// inside the other's h-box (F(x-h)-h <= G(x) <= F(x+h)+h for all x). Unlike
/// the KS distance, the Levy metric metrizes weak convergence even when the
/// limit law has atoms, so it is the right yardstick for laws converging to a
/// distribution with a point mass. Requires n1, n2 >= 50.
double levy_two_sample(std::vector<double> a, std::vector<double> b);

/// Outcome of one path run until exit from an interval (or censoring at the
/// step budget). Produced by both construction methods.
struct ExitSample {
    int side = 0;              // -1 left, +1 right, 0 censored
    double exit_time = 0.0;    // model time
    double time_at_zero = 0.0; // model time spent showing the value 0
    double occ_f = 0.0;        // integral of f along the path, when requested
    bool censored = false;
};

struct ExitSummary {
    double exit_left_freq = 0.0;
    double exit_right_freq = 0.0;
    MCEstimate mean_exit_time;
    MCEstimate mean_time_at_zero;
    MCEstimate mean_occ_f;
    std::size_t censored = 0;
    std::size_t n = 0;
};

/// Aggregates exit outcomes. Censored paths are counted, never dropped;
/// throws std::runtime_error when their fraction exceeds `censor_threshold`
/// (acceptance budgets must size horizons so this cannot trip).
ExitSummary exit_statistics(const std::vector<ExitSample>& samples,
                            double censor_threshold = 1e-3);

}  // namespace stickylab
