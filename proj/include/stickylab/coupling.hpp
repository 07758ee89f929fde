#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stickylab/regularized.hpp"
#include "stickylab/stats.hpp"

namespace stickylab {

/// The alternating threshold ladder on |Z| = |X - Y|:
///   S_1 = first time |Z| >= 6 eps,
///   T_i = first time >= S_i with |Z| <= 4 eps or |Z| >= b,
///   S_{i+1} = first time >= T_i with |Z| >= 6 eps,
///   U_b = first time |Z| >= b.
/// Once |Z| >= b the S/T conditions hold simultaneously, so remaining rungs
/// tick instantly at that index; this keeps every T_n defined on paths that
/// diverge early.
struct StoppingLedger {
    std::vector<std::size_t> s_times;  // step indices
    std::vector<std::size_t> t_times;
    std::ptrdiff_t u_b = -1;           // -1: never reached within the horizon
    std::size_t truncation = 0;        // horizon step index
};

/// Throws std::domain_error unless b > 6 * epsilon.
StoppingLedger detect_ledger(const CoupledPath& path, double epsilon, double b,
                             std::size_t max_rungs = 1000);

/// J[j] = h * #{k < j : |x_k| <= eps or |y_k| <= 2 eps}; nondecreasing,
/// J[0] = 0, Lipschitz-1 in model time.
std::vector<double> occupation_J(const CoupledPath& path, double epsilon);

/// Aggregated outcome of a batch of coupled trials.
struct ExperimentReport {
    std::uint64_t trials = 0;
    std::map<std::string, std::uint64_t> event_counts;
    std::map<std::string, MCEstimate> estimates;
    std::map<std::string, double> parameters;
    std::vector<std::string> notes;
};

/// One streaming coupled trial, everything the experiments need and nothing
/// path-sized. Rung bookkeeping is recorded at the requested rung counts.
struct TrialRecord {
    static constexpr std::size_t kMaxNs = 3;
    double u_b_time = -1.0;                       // -1: not seen
    std::array<double, kMaxNs> s_time{{-1.0, -1.0, -1.0}};
    std::array<double, kMaxNs> t_time{{-1.0, -1.0, -1.0}};
    std::array<double, kMaxNs> j_at_t{{-1.0, -1.0, -1.0}};
    double tau_r = -1.0;                          // X-leg exit of [-R, R]
    double j_at_tau_r = -1.0;
    double j_final = 0.0;
    double end_time = 0.0;
    bool censored = false;                        // horizon hit before resolution
};

struct CoupledTrialConfig {
    RegConfig reg;
    double b = 1.0;
    std::vector<int> record_ns;   // up to 3 rung counts, strictly increasing
    double R = 0.0;               // 0 disables tau_R tracking
    std::uint64_t first_trial = 0;
    std::uint64_t n_trials = 0;
    int workers = 1;
    bool run_to_horizon = false;  // divergence runs: never stop early
    // Replace every frozen segment (both legs outside their bands, Z
    // constant) with an exact sample of the Brownian re-entry point. The
    // ladder, U_b, and the band occupation J are unchanged in law - nothing
    // event-relevant moves while Z is frozen - but recorded times count only
    // unfrozen time, so this mode is for event probabilities, not clocks.
    // Without it U_b inherits the heavy (~1/sqrt(t)) tail of Brownian return
    // times and no finite horizon resolves every trial. Incompatible with
    // R > 0 (tau_R depends on X during freezes) and run_to_horizon.
    bool excise_freezes = false;
};

/// SIMD-batched trial runner; deterministic in (seed, trial index).
std::vector<TrialRecord> run_coupled_trials(const CoupledTrialConfig& cfg);

/// Empirical P(S_n < U_b) against the ladder bound (1 - 2 eps / b)^n.
/// Requires n >= 1, b > 6 eps, trials >= 1000. Censored trials are counted as
/// events, which can only overstate the probability being bounded.
ExperimentReport verify_est_p1(const RegConfig& cfg, int n, double b,
                               std::uint64_t trials, int workers = 1);

/// Frozen constants of the divergence experiment; produced by calibrate().
struct Calibration {
    double beta = 0.0;
    double c1 = 0.0;   // empirical occupation constant, mean J_{T_n} / (n eps)
    double K = 0.0;    // 10 * c1 * beta
    double R = 0.0;
    double t0 = 0.0;
};

/// Estimates P(sup_{s <= t0} |Z| >= b) over `trials` coupled runs, with the
/// four diagnostic event frequencies. The simulated horizon is
/// min(t0, cfg.horizon); when that is below t0 the estimate is a lower bound
/// for the t0 event (the event is monotone in the horizon) and the report
/// says so.
ExperimentReport run_divergence(const RegConfig& cfg, double b, double beta, double t0,
                                std::uint64_t trials, const Calibration* calib = nullptr,
                                int workers = 1);

/// Pilot-based calibration following the experiment's event bookkeeping:
/// c1 from coupled pilots, K = 10 c1 beta, then R via the
/// band-occupation/downcrossing decomposition with pilot-estimated cycle
/// moments, and t0 = E tau_{[-R,R]} / eta with the expectation evaluated in
/// closed form from the band speed measure. target_eta must lie in (0, 1/4].
Calibration calibrate(const RegConfig& cfg, double target_eta, int workers = 1);

}  // namespace stickylab
