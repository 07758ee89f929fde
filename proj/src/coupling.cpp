#include "stickylab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stickylab/kernels.hpp"
#include "stickylab/parallel.hpp"
#include "stickylab/rng.hpp"

namespace stickylab {

namespace {

// Pilot substreams live far above any acceptance trial index.
constexpr std::uint64_t kPilotOffset = 1ull << 32;

bool band_hit(double x, double y, double eps) {
    return std::abs(x) <= eps || std::abs(y) <= 2.0 * eps;
}

MCEstimate proportion_estimate(std::uint64_t hits, std::uint64_t trials) {
    MCEstimate e;
    e.n = trials;
    double n = static_cast<double>(trials);
    double p = static_cast<double>(hits) / n;
    e.mean = p;
    if (trials >= 2) {
        e.variance = p * (1.0 - p) * n / (n - 1.0);
        e.se = std::sqrt(e.variance / n);
    } else {
        e.variance = std::numeric_limits<double>::quiet_NaN();
        e.se = std::numeric_limits<double>::quiet_NaN();
    }
    e.ci_half_width = 3.0 * e.se;
    return e;
}

}  // namespace

StoppingLedger detect_ledger(const CoupledPath& path, double epsilon, double b,
                             std::size_t max_rungs) {
    if (!(b > 6.0 * epsilon))
        throw std::domain_error("detect_ledger: require b > 6*epsilon");
    StoppingLedger ledger;
    ledger.truncation = path.z_values.empty() ? 0 : path.z_values.size() - 1;
    bool waiting_s = true;
    for (std::size_t j = 0; j < path.z_values.size(); ++j) {
        double az = std::abs(path.z_values[j]);
        if (ledger.u_b < 0 && az >= b) ledger.u_b = static_cast<std::ptrdiff_t>(j);
        while (ledger.t_times.size() < max_rungs) {
            if (waiting_s) {
                if (az < 6.0 * epsilon) break;
                ledger.s_times.push_back(j);
                waiting_s = false;
            } else {
                if (az > 4.0 * epsilon && az < b) break;
                ledger.t_times.push_back(j);
                waiting_s = true;
            }
        }
    }
    return ledger;
}

std::vector<double> occupation_J(const CoupledPath& path, double epsilon) {
    std::vector<double> J(path.grid.size(), 0.0);
    if (path.grid.size() < 2) return J;
    double h = path.grid[1] - path.grid[0];
    for (std::size_t j = 1; j < path.grid.size(); ++j)
        J[j] = J[j - 1] +
               (band_hit(path.x_values[j - 1], path.y_values[j - 1], epsilon) ? h : 0.0);
    return J;
}

std::vector<TrialRecord> run_coupled_trials(const CoupledTrialConfig& cfg) {
    validate(cfg.reg);
    if (2.0 * cfg.reg.epsilon > cfg.reg.gamma)
        throw std::domain_error("run_coupled_trials: require 2*epsilon <= gamma");
    if (!(cfg.b > 6.0 * cfg.reg.epsilon))
        throw std::domain_error("run_coupled_trials: require b > 6*epsilon");
    if (cfg.record_ns.empty() || cfg.record_ns.size() > TrialRecord::kMaxNs)
        throw std::invalid_argument("run_coupled_trials: need 1..3 rung counts");
    if (cfg.excise_freezes && (cfg.R > 0.0 || cfg.run_to_horizon))
        throw std::invalid_argument(
            "run_coupled_trials: excise_freezes tracks no real time and cannot "
            "be combined with tau_R or run_to_horizon");
    for (std::size_t i = 0; i < cfg.record_ns.size(); ++i) {
        if (cfg.record_ns[i] < 1 ||
            (i > 0 && cfg.record_ns[i] <= cfg.record_ns[i - 1]))
            throw std::invalid_argument(
                "run_coupled_trials: rung counts must be strictly increasing and >= 1");
    }
    const Kernels& kern = active_kernels();
    double eps = cfg.reg.epsilon, h = cfg.reg.step, b = cfg.b;
    std::uint64_t max_steps = static_cast<std::uint64_t>(std::round(cfg.reg.horizon / h));
    double root_h = std::sqrt(h);
    LegParams leg_x{eps, std::sqrt(eps / cfg.reg.gamma) * root_h, root_h};
    LegParams leg_y{2.0 * eps, std::sqrt(2.0 * eps / cfg.reg.gamma) * root_h, root_h};
    int rung_cap = cfg.record_ns.back();

    std::vector<TrialRecord> out(cfg.n_trials);
    parallel_blocks(cfg.n_trials, cfg.workers, [&](std::size_t begin, std::size_t end) {
        std::size_t n = end - begin;
        std::vector<double> x(n, cfg.reg.x0), y(n, cfg.reg.x0), z(n, 0.0), u(n), xi(n);
        std::vector<std::uint64_t> streams(n), ctrs(n, 0), j_count(n, 0);
        std::vector<std::size_t> slot(n);
        std::vector<int> s_count(n, 0), t_count(n, 0);
        std::vector<char> waiting_s(n, 1);
        std::vector<TrialRecord> rec(n);
        for (std::size_t i = 0; i < n; ++i) {
            streams[i] = stream_id(StreamPurpose::coupled, cfg.first_trial + begin + i);
            slot[i] = begin + i;
        }
        std::size_t active = n;
        std::uint64_t iter = 0;
        while (active > 0) {
            double t = static_cast<double>(iter) * h;
            bool out_of_time = iter >= max_steps;
            std::size_t kept = 0;
            for (std::size_t i = 0; i < active; ++i) {
                double az = std::abs(z[i]);
                TrialRecord& r = rec[i];
                if (r.u_b_time < 0.0 && az >= b) r.u_b_time = t;
                while (t_count[i] < rung_cap) {
                    if (waiting_s[i]) {
                        if (az < 6.0 * eps) break;
                        ++s_count[i];
                        for (std::size_t m = 0; m < cfg.record_ns.size(); ++m)
                            if (s_count[i] == cfg.record_ns[m]) r.s_time[m] = t;
                        waiting_s[i] = 0;
                    } else {
                        if (az > 4.0 * eps && az < b) break;
                        ++t_count[i];
                        for (std::size_t m = 0; m < cfg.record_ns.size(); ++m)
                            if (t_count[i] == cfg.record_ns[m]) {
                                r.t_time[m] = t;
                                r.j_at_t[m] = static_cast<double>(j_count[i]) * h;
                            }
                        waiting_s[i] = 1;
                    }
                }
                if (cfg.R > 0.0 && r.tau_r < 0.0 && std::abs(x[i]) >= cfg.R) {
                    r.tau_r = t;
                    r.j_at_tau_r = static_cast<double>(j_count[i]) * h;
                }
                bool resolved =
                    cfg.run_to_horizon
                        ? (r.u_b_time >= 0.0 && (cfg.R <= 0.0 || r.tau_r >= 0.0))
                        : (t_count[i] >= rung_cap && (cfg.R <= 0.0 || r.tau_r >= 0.0));
                if (resolved || out_of_time) {
                    r.censored = !resolved && !cfg.run_to_horizon;
                    r.end_time = t;
                    r.j_final = static_cast<double>(j_count[i]) * h;
                    out[slot[i]] = r;
                    continue;
                }
                if (cfg.excise_freezes && std::abs(x[i]) > eps &&
                    std::abs(y[i]) > 2.0 * eps) {
                    // Frozen segment: both legs outside their bands, the pair
                    // translates rigidly until the driver re-enters
                    // U = [-eps, eps] u [z-2eps, z+2eps] (Y's band seen
                    // through X = Y + z). Replace the excursion with an exact
                    // sample of the first re-entry point: Brownian hitting
                    // probabilities are linear in the start point.
                    double zc = z[i];
                    double lo = -std::numeric_limits<double>::infinity();
                    double hi = std::numeric_limits<double>::infinity();
                    if (x[i] > eps)
                        lo = std::max(lo, eps);
                    else
                        hi = std::min(hi, -eps);
                    if (x[i] > zc + 2.0 * eps)
                        lo = std::max(lo, zc + 2.0 * eps);
                    else
                        hi = std::min(hi, zc - 2.0 * eps);
                    double target;
                    if (!std::isfinite(lo)) {
                        target = hi;
                    } else if (!std::isfinite(hi)) {
                        target = lo;
                    } else {
                        double u01 =
                            philox_uniform(cfg.reg.seed, streams[i], ctrs[i]++);
                        target = u01 < (x[i] - lo) / (hi - lo) ? hi : lo;
                    }
                    x[i] = target;
                    y[i] = target - zc;
                }
                if (band_hit(x[i], y[i], eps)) ++j_count[i];
                if (kept != i) {
                    x[kept] = x[i];
                    y[kept] = y[i];
                    z[kept] = z[i];
                    streams[kept] = streams[i];
                    ctrs[kept] = ctrs[i];
                    j_count[kept] = j_count[i];
                    slot[kept] = slot[i];
                    s_count[kept] = s_count[i];
                    t_count[kept] = t_count[i];
                    waiting_s[kept] = waiting_s[i];
                    rec[kept] = rec[i];
                }
                ++kept;
            }
            active = kept;
            if (active == 0) break;
            kern.uniform_batch(cfg.reg.seed, streams.data(), ctrs.data(), u.data(), active);
            kern.normal_batch(u.data(), xi.data(), active);
            kern.coupled_step(x.data(), y.data(), z.data(), xi.data(), active, leg_x, leg_y);
            for (std::size_t i = 0; i < active; ++i) ++ctrs[i];
            ++iter;
        }
    });
    return out;
}

ExperimentReport verify_est_p1(const RegConfig& cfg, int n, double b,
                               std::uint64_t trials, int workers) {
    if (n < 1) throw std::invalid_argument("verify_est_p1: n must be >= 1");
    if (!(b > 6.0 * cfg.epsilon)) throw std::domain_error("verify_est_p1: b <= 6*epsilon");
    if (trials < 1000) throw std::invalid_argument("verify_est_p1: need >= 1000 trials");
    CoupledTrialConfig tc;
    tc.reg = cfg;
    tc.b = b;
    tc.record_ns = {n};
    tc.n_trials = trials;
    tc.workers = workers;
    std::vector<TrialRecord> recs = run_coupled_trials(tc);
    std::uint64_t events = 0, censored = 0;
    for (const TrialRecord& r : recs) {
        bool s_before_u =
            r.s_time[0] >= 0.0 && (r.u_b_time < 0.0 || r.s_time[0] < r.u_b_time);
        if (r.censored) {
            ++censored;
            ++events;  // counted as an event: only overstates the bounded P
        } else if (s_before_u) {
            ++events;
        }
    }
    ExperimentReport rep;
    rep.trials = trials;
    rep.event_counts["s_n_before_u_b"] = events;
    rep.event_counts["censored"] = censored;
    rep.estimates["p_s_n_before_u_b"] = proportion_estimate(events, trials);
    rep.parameters["epsilon"] = cfg.epsilon;
    rep.parameters["gamma"] = cfg.gamma;
    rep.parameters["step"] = cfg.step;
    rep.parameters["horizon"] = cfg.horizon;
    rep.parameters["b"] = b;
    rep.parameters["n"] = static_cast<double>(n);
    rep.parameters["bound"] = std::pow(1.0 - 2.0 * cfg.epsilon / b, n);
    return rep;
}

ExperimentReport run_divergence(const RegConfig& cfg, double b, double beta, double t0,
                                std::uint64_t trials, const Calibration* calib,
                                int workers) {
    if (!(beta > 0.0) || !(t0 > 0.0))
        throw std::invalid_argument("run_divergence: beta and t0 must be positive");
    int n = static_cast<int>(std::ceil(beta / cfg.epsilon));
    double horizon = std::min(t0, cfg.horizon);
    CoupledTrialConfig tc;
    tc.reg = cfg;
    tc.reg.horizon = horizon;
    tc.b = b;
    tc.record_ns = {n};
    tc.R = calib ? calib->R : 0.0;
    tc.n_trials = trials;
    tc.workers = workers;
    tc.run_to_horizon = true;
    std::vector<TrialRecord> recs = run_coupled_trials(tc);

    std::uint64_t sup_events = 0, a1 = 0, a2 = 0, a2_resolved = 0;
    std::uint64_t a3 = 0, tau_seen = 0;
    double threshold = calib ? 5.0 * calib->c1 * beta : -1.0;
    for (const TrialRecord& r : recs) {
        if (r.u_b_time >= 0.0) ++sup_events;
        if (r.s_time[0] >= 0.0 && (r.u_b_time < 0.0 || r.s_time[0] < r.u_b_time)) ++a1;
        if (r.t_time[0] >= 0.0) {
            ++a2_resolved;
            if (threshold > 0.0 && r.j_at_t[0] >= threshold) ++a2;
        }
        if (r.tau_r >= 0.0) {
            ++tau_seen;
            if (calib && r.j_at_tau_r < calib->K) ++a3;
        }
    }
    ExperimentReport rep;
    rep.trials = trials;
    rep.event_counts["sup_z_ge_b"] = sup_events;
    rep.event_counts["a1_s_n_before_u_b"] = a1;
    rep.event_counts["a2_j_tn_ge_5c1beta"] = a2;
    rep.event_counts["a2_resolved"] = a2_resolved;
    rep.event_counts["a3_j_tau_r_lt_k"] = a3;
    rep.event_counts["a4_tau_r_not_within_horizon"] = trials - tau_seen;
    MCEstimate p = proportion_estimate(sup_events, trials);
    rep.estimates["p_sup_z_ge_b"] = p;
    rep.parameters["epsilon"] = cfg.epsilon;
    rep.parameters["gamma"] = cfg.gamma;
    rep.parameters["step"] = cfg.step;
    rep.parameters["b"] = b;
    rep.parameters["beta"] = beta;
    rep.parameters["n"] = static_cast<double>(n);
    rep.parameters["t0"] = t0;
    rep.parameters["horizon"] = horizon;
    if (calib) {
        rep.parameters["K"] = calib->K;
        rep.parameters["R"] = calib->R;
        rep.parameters["c1"] = calib->c1;
    }
    if (trials < 2)
        rep.notes.push_back("insufficient sample: standard errors undefined");
    if (horizon < t0)
        rep.notes.push_back(
            "horizon below t0: the sup event is monotone in the horizon, so the "
            "estimate is a lower bound for the t0 event");
    return rep;
}

Calibration calibrate(const RegConfig& cfg, double target_eta, int workers) {
    if (!(target_eta > 0.0) || target_eta > 0.25)
        throw std::invalid_argument("calibrate: target_eta must lie in (0, 1/4]");
    validate(cfg);
    Calibration cal;
    // (1 - 2 eps)^(beta/eps) <= e^(-2 beta) < 1/5 for beta = 0.9.
    cal.beta = 0.9;
    int n = static_cast<int>(std::ceil(cal.beta / cfg.epsilon));

    // Pilot 1: the occupation constant c1 = mean J_{T_n} / (n eps).
    CoupledTrialConfig tc;
    tc.reg = cfg;
    tc.record_ns = {n};
    tc.first_trial = kPilotOffset;
    tc.n_trials = 512;
    tc.workers = workers;
    std::vector<TrialRecord> recs = run_coupled_trials(tc);
    std::vector<double> j_samples;
    for (const TrialRecord& r : recs)
        if (!r.censored && r.j_at_t[0] >= 0.0) j_samples.push_back(r.j_at_t[0]);
    if (j_samples.size() < 64)
        throw std::runtime_error("calibrate: pilot budget exhausted before J_{T_n} "
                                 "resolved often enough (horizon too small?)");
    cal.c1 = mc_mean(j_samples).mean / (n * cfg.epsilon);
    cal.K = 10.0 * cal.c1 * cal.beta;

    // Pilot 2: per-excursion band occupation V = H_{tau_[-1,1]} started at 0.
    // Using only the outbound half of each 0 -> boundary -> 0 cycle
    // underestimates the cycle mean, which can only push R upward.
    RegBatchConfig rb;
    rb.reg = cfg;
    rb.first_path = kPilotOffset;
    rb.n_paths = 512;
    rb.workers = workers;
    std::vector<ExitSample> exits = reg_exit_batch(rb, Interval(-1.0, 1.0));
    std::vector<double> v_samples;
    for (const ExitSample& e : exits)
        if (!e.censored) v_samples.push_back(e.time_at_zero);
    if (v_samples.size() < 64)
        throw std::runtime_error("calibrate: pilot budget exhausted on excursion moments");
    MCEstimate v = mc_mean(v_samples);
    double mu = v.mean, var = v.variance;
    if (!(mu > 0.0)) throw std::runtime_error("calibrate: degenerate excursion pilot");

    // k cycles guarantee total band time >= K except with probability eta/2
    // (Chebyshev on the i.i.d. cycle sums), then R makes k downcrossings of
    // [0,1] happen before exiting [-R,R] except with probability eta/2.
    double k = std::ceil(std::max(2.0 * cal.K / mu,
                                  8.0 * var / (mu * mu * target_eta)));
    cal.R = std::ceil(1.0 / (1.0 - std::pow(1.0 - target_eta / 2.0, 1.0 / k)));

    // E tau_[-R,R] in closed form from the band speed measure, then Chebyshev.
    SpeedMeasure m_eps = SpeedMeasure::band_regularized(cfg.epsilon, cfg.gamma);
    double mean_tau = expected_exit_time(m_eps, Interval(-cal.R, cal.R), 0.0);
    cal.t0 = mean_tau / target_eta;
    return cal;
}

}  // namespace stickylab
