#include "stickylab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stickylab/coupling.hpp"
#include "stickylab/lattice_walk.hpp"
#include "stickylab/regularized.hpp"
#include "stickylab/rng.hpp"
#include "stickylab/speed_measure.hpp"
#include "stickylab/stats.hpp"
#include "stickylab/time_change.hpp"

namespace stickylab {

namespace {

std::uint64_t scaled(double n, double scale, double floor_at) {
    return static_cast<std::uint64_t>(std::llround(std::max(floor_at, n * scale)));
}

double proportion_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

/// Thrown by a check body when the run budget cannot support the check;
/// surfaces as INSUFFICIENT rather than FAIL.
struct InsufficientSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runs one named check, turning any exception into a failed check rather
// than aborting the suite.
template <typename Fn>
void run_check(std::vector<CheckResult>& out, const std::string& name, Fn&& fn) {
    CheckResult r;
    r.name = name;
    try {
        fn(r);
    } catch (const InsufficientSamples& e) {
        r.pass = false;
        r.insufficient = true;
        r.details["insufficient_samples"] = e.what();
    } catch (const std::exception& e) {
        r.pass = false;
        r.details["error"] = e.what();
    }
    out.push_back(std::move(r));
}

// ---------------------------------------------------------------------------
// Divergence-experiment constants, frozen from a calibration pilot
// (calibrate() with seed 20260823, eta = 0.2, 512 pilot trials per leg;
// the `calibrate` CLI command reproduces them). t0 comes from the Chebyshev
// bound t0 = E tau_[-R,R] / eta, far beyond what is worth simulating; the
// sup event is monotone in the horizon, so the runs below use a short
// horizon and report a lower bound for the t0 event.
struct DivergenceSetup {
    double epsilon;
    Calibration cal;
    double horizon;
};

const DivergenceSetup kDivergence[] = {
    {0.04, {0.9, 4.818436972312876, 43.36593275081588, 476.0, 1137639.8000000033}, 20.0},
    {0.02, {0.9, 3.7178681746031743, 33.46081357142857, 466.0, 1090439.8999999987}, 20.0},
};

// ---------------------------------------------------------------------------
// analytic suite: closed-form identities of the speed-measure layer.

void add_analytic(std::vector<CheckResult>& out, const VerifyOptions& opt) {
    run_check(out, "A1-green-kernel", [&](CheckResult& r) {
        Interval I(-1.0, 1.0);
        bool ok = std::abs(green_kernel(I, 0.0, 0.0) - 1.0) < 1e-14;
        ok = ok && green_kernel(I, -1.0, 0.3) == 0.0;
        ok = ok && std::abs(green_kernel(Interval(0.0, 2.0), 0.5, 1.5) - 0.25) < 1e-14;
        StreamRng rng(opt.seed, stream_id(StreamPurpose::generic, 1));
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double a = 4.0 * rng.uniform() - 2.0;
            double b = a + 0.1 + 3.0 * rng.uniform();
            Interval J(a, b);
            double x = a + J.length() * rng.uniform();
            double y = a + J.length() * rng.uniform();
            worst = std::max(worst,
                             std::abs(green_kernel(J, x, y) - green_kernel(J, y, x)));
            ok = ok && green_kernel(J, x, y) >= 0.0;
            ok = ok && green_kernel(J, a, y) == 0.0 && green_kernel(J, x, b) == 0.0;
        }
        ok = ok && worst < 1e-12;
        r.details["symmetry_worst"] = worst;
        r.pass = ok;
    });

    run_check(out, "A2-measure-mass", [&](CheckResult& r) {
        bool ok = std::abs(SpeedMeasure::lebesgue_plus_atom(1.0).mass(Interval(-1, 1), true) -
                           3.0) < 1e-12;
        ok = ok && std::abs(SpeedMeasure::lebesgue().mass(Interval(0, 5), true) - 5.0) < 1e-12;
        ok = ok && std::abs(SpeedMeasure::band_regularized(0.1, 1.0).mass(Interval(-1, 1), true) -
                            4.0) < 1e-12;
        r.pass = ok;
    });

    run_check(out, "A3-exit-time", [&](CheckResult& r) {
        StreamRng rng(opt.seed, stream_id(StreamPurpose::generic, 2));
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double a = 4.0 * rng.uniform() - 2.0;
            double b = a + 0.1 + 3.0 * rng.uniform();
            double x = a + (b - a) * rng.uniform();
            double got = expected_exit_time(SpeedMeasure::lebesgue(), Interval(a, b), x);
            worst = std::max(worst, std::abs(got - (x - a) * (b - x)));
        }
        ok = ok && worst < 1e-12;
        double gamma = 0.7;
        double g = expected_exit_time(SpeedMeasure::lebesgue_plus_atom(gamma),
                                      Interval(-1, 1), 0.0);
        ok = ok && std::abs(g - (1.0 + gamma)) < 1e-12;
        ok = ok && expected_exit_time(SpeedMeasure::lebesgue_plus_atom(gamma),
                                      Interval(-1, 1), 1.0) == 0.0;
        // Adding an interior atom strictly increases G at interior points.
        double base = expected_exit_time(SpeedMeasure::lebesgue(), Interval(-1, 1), 0.3);
        double more = expected_exit_time(SpeedMeasure::lebesgue_plus_atom(0.2, 0.5),
                                         Interval(-1, 1), 0.3);
        ok = ok && more > base;
        r.details["lebesgue_worst"] = worst;
        r.pass = ok;
    });

    run_check(out, "A4-occupation", [&](CheckResult& r) {
        SpeedMeasure m = SpeedMeasure::lebesgue_plus_atom(1.0);
        OccupationQuery q{Interval(-1, 1), 0.0,
                          [](double y) { return y == 0.0 ? 1.0 : 0.0; }};
        bool ok = std::abs(occupation_functional(m, q) - 1.0) < 1e-8;
        OccupationQuery q1{Interval(-1, 1), 0.0, [](double) { return 1.0; }};
        double full = occupation_functional(m, q1);
        double g = expected_exit_time(m, Interval(-1, 1), 0.0);
        ok = ok && std::abs(full - g) <= 1e-9 * g;
        OccupationQuery q2{Interval(-1, 1), 0.0,
                           [](double y) { return (y >= 0.2 && y <= 0.5) ? 1.0 : 0.0; }};
        double band = occupation_functional(SpeedMeasure::lebesgue(), q2);
        ok = ok && std::abs(band - 0.195) < 1e-9;
        r.details["f_equals_1_vs_G"] = full - g;
        r.details["indicator_band"] = band;
        r.pass = ok;
    });
}

// ---------------------------------------------------------------------------
// construction suite: criteria 1-5 (time-change construction).

void add_construction(std::vector<CheckResult>& out, const VerifyOptions& opt) {
    const double delta = 0.005;

    run_check(out, "01-natural-scale", [&](CheckResult& r) {
        StickyEngineConfig ec;
        ec.m = SpeedMeasure::lebesgue_plus_atom(1.0);
        ec.spacing = delta;
        ec.seed = opt.seed;
        ec.first_path = 0;
        ec.n_paths = scaled(5e4, opt.scale, 1000);
        ec.workers = opt.workers;
        ExitSummary s = exit_statistics(run_sticky_exit(ec, Interval(-1.0, 2.0)));
        double n = static_cast<double>(s.n - s.censored);
        double p = s.exit_right_freq;
        double se = proportion_se(p, n);
        r.details["p_exit_right"] = p;
        r.details["target"] = 1.0 / 3.0;
        r.details["se"] = se;
        r.details["n"] = s.n;
        r.pass = std::abs(p - 1.0 / 3.0) <= 3.0 * se;
    });

    // Criteria 2, 3 (gamma = 1) and 4 share one batch on [-1, 1].
    SpeedMeasure m1 = SpeedMeasure::lebesgue_plus_atom(1.0);
    StickyEngineConfig shared;
    shared.m = m1;
    shared.spacing = delta;
    shared.seed = opt.seed;
    shared.first_path = 100000;
    shared.n_paths = scaled(5e4, opt.scale, 1000);
    shared.workers = opt.workers;
    ExitSummary shared_summary;
    bool shared_ok = true;
    try {
        shared_summary = exit_statistics(run_sticky_exit(
            shared, Interval(-1.0, 1.0),
            [](double y) { return (y >= 0.2 && y <= 0.5) ? 1.0 : 0.0; }));
    } catch (...) {
        shared_ok = false;
    }

    run_check(out, "02-expected-exit-time", [&](CheckResult& r) {
        if (!shared_ok) throw std::runtime_error("shared construction batch failed");
        double target = expected_exit_time(m1, Interval(-1.0, 1.0), 0.0);
        const MCEstimate& e = shared_summary.mean_exit_time;
        double tol = e.ci_half_width + 0.03 * target;
        r.details["mean_exit_time"] = e.mean;
        r.details["target"] = target;
        r.details["tolerance"] = tol;
        r.details["se"] = e.se;
        r.pass = std::abs(e.mean - target) <= tol;
    });

    run_check(out, "03-sticky-occupation", [&](CheckResult& r) {
        if (!shared_ok) throw std::runtime_error("shared construction batch failed");
        bool ok = true;
        json per_gamma = json::array();
        const double gammas[] = {0.5, 1.0, 2.0};
        for (int gi = 0; gi < 3; ++gi) {
            double gamma = gammas[gi];
            MCEstimate e;
            if (gamma == 1.0) {
                e = shared_summary.mean_time_at_zero;
            } else {
                StickyEngineConfig ec = shared;
                ec.m = SpeedMeasure::lebesgue_plus_atom(gamma);
                ec.first_path = 200000 + 100000ull * static_cast<std::uint64_t>(gi);
                e = exit_statistics(run_sticky_exit(ec, Interval(-1.0, 1.0)))
                        .mean_time_at_zero;
            }
            double tol = e.ci_half_width + 0.03 * gamma;
            bool cell = std::abs(e.mean - gamma) <= tol;
            ok = ok && cell;
            json c;
            c["gamma"] = gamma;
            c["mean_time_at_zero"] = e.mean;
            c["tolerance"] = tol;
            c["pass"] = cell;
            per_gamma.push_back(c);
        }
        r.details["cells"] = per_gamma;
        r.pass = ok;
    });

    run_check(out, "04-occupation-functional", [&](CheckResult& r) {
        if (!shared_ok) throw std::runtime_error("shared construction batch failed");
        OccupationQuery q{Interval(-1.0, 1.0), 0.0,
                          [](double y) { return (y >= 0.2 && y <= 0.5) ? 1.0 : 0.0; }};
        double target = occupation_functional(m1, q);
        const MCEstimate& e = shared_summary.mean_occ_f;
        double tol = e.ci_half_width + 0.03 * target;
        r.details["mean_integral"] = e.mean;
        r.details["target"] = target;
        r.details["tolerance"] = tol;
        r.pass = std::abs(e.mean - target) <= tol;
    });

    run_check(out, "05-semimartingale-identities", [&](CheckResult& r) {
        const double t = 1.0, dt = 1e-4;
        StickyEngineConfig ec;
        ec.m = m1;
        ec.spacing = delta;
        ec.seed = opt.seed;
        ec.first_path = 600000;
        ec.n_paths = scaled(1e3, opt.scale, 200);
        ec.workers = opt.workers;
        std::vector<IdentityStats> fine = run_identity_stats(ec, t, dt);
        ec.spacing = 0.02;
        ec.first_path = 700000;
        std::vector<IdentityStats> coarse = run_identity_stats(ec, t, dt);
        std::vector<double> qv, mf, mc;
        for (const IdentityStats& s : fine) {
            if (s.censored) throw std::runtime_error("identity run censored");
            qv.push_back(s.qv_dev);
            mf.push_back(s.mart_abs);
        }
        for (const IdentityStats& s : coarse) {
            if (s.censored) throw std::runtime_error("identity run censored");
            mc.push_back(s.mart_abs);
        }
        MCEstimate qve = mc_mean(qv);
        MCEstimate mfe = mc_mean(mf);
        MCEstimate mce = mc_mean(mc);
        double ratio = mfe.mean / mce.mean;
        double ratio_se =
            ratio * std::sqrt(mfe.se * mfe.se / (mfe.mean * mfe.mean) +
                              mce.se * mce.se / (mce.mean * mce.mean));
        // The defect scales like sqrt(delta * (delta + gamma)), so the
        // population value of this ratio is sqrt(df*(dc+g)/(dc*(df+g))),
        // slightly above the 1/2 gate for any spacing pair.
        double predicted = std::sqrt(delta * (0.02 + 1.0) / (0.02 * (delta + 1.0)));
        bool qv_ok = qve.mean <= 0.02 * t;
        bool mart_ok = ratio < 0.5;
        r.details["mean_qv_deviation"] = qve.mean;
        r.details["qv_limit"] = 0.02 * t;
        r.details["mean_abs_mart_fine"] = mfe.mean;
        r.details["mean_abs_mart_coarse"] = mce.mean;
        r.details["ratio"] = ratio;
        r.details["ratio_se"] = ratio_se;
        r.details["ratio_limit"] = 0.5;
        r.details["ratio_population_value"] = predicted;
        r.details["qv_pass"] = qv_ok;
        r.details["mart_pass"] = mart_ok;
        r.pass = qv_ok && mart_ok;
    });
}

// ---------------------------------------------------------------------------
// convergence suite: criterion 6 (weak convergence of the regularized SDE).

void add_convergence(std::vector<CheckResult>& out, const VerifyOptions& opt) {
    run_check(out, "06-weak-convergence", [&](CheckResult& r) {
        const double gamma = 1.0, t = 1.0;
        std::uint64_t n = scaled(opt.full ? 1e4 : 3e3, opt.scale, 200);
        double p_gate = opt.full ? 0.01 : 0.005;

        // Same-law comparison: the regularized diffusion has speed measure
        // dy + (gamma/eps) 1_band dy, which the time change can target
        // directly. Both routes then approximate the identical process and
        // the two-sample KS test is applicable as stated. The Euler step uses
        // h = eps^2/200, well under the eps^2/25 cap: at the cap the spatial
        // step sqrt(h) = eps/5 under-resolves the band and biases the band
        // occupancy low by ~0.03 in probability, which KS at 10^4 samples
        // detects; the step rule's stated purpose is to keep that bias under
        // the statistical noise, which requires the finer step here. The walk
        // spacing eps/16 keeps the lattice leg's band resolution comparable.
        const double eps = 0.01;
        RegBatchConfig rb;
        rb.reg = RegConfig{eps, gamma, eps * eps / 200.0, t, 0.0, opt.seed};
        rb.first_path = 0;
        rb.n_paths = n;
        rb.workers = opt.workers;
        std::vector<double> em = reg_endpoint_batch(rb);

        StickyEngineConfig ec;
        ec.m = SpeedMeasure::band_regularized(eps, gamma);
        ec.spacing = eps / 16.0;
        ec.seed = opt.seed;
        ec.first_path = 800000;
        ec.n_paths = n;
        ec.workers = opt.workers;
        std::vector<double> tc = sample_sticky_endpoint(ec, t);
        for (double v : tc)
            if (std::isnan(v)) throw std::runtime_error("time-change endpoint censored");
        KSResult dual = ks_two_sample(em, tc);

        // The literal comparison against the sticky limit: the limit law has
        // an atom at 0 while every X^eps law is atomless, so the KS distance
        // converges to half the atom mass instead of 0 - reported, not gated.
        // (The band measure carries mass 2*gamma near 0, hence the atom of
        // the weak limit is 2*gamma.)
        StickyEngineConfig lim = ec;
        lim.m = SpeedMeasure::lebesgue_plus_atom(2.0 * gamma);
        lim.spacing = 0.005;
        lim.first_path = 900000;
        std::vector<double> sticky = sample_sticky_endpoint(lim, t);
        KSResult literal = ks_two_sample(em, sticky);

        // Trend: the distance to the limit law shrinks as eps does. The KS
        // distance cannot carry this trend - against a limit with an atom it
        // converges upward to half the atom mass (observed plateau ~0.27), so
        // its ordering across eps is pure noise. The Levy metric metrizes the
        // weak convergence being claimed and decreases ~linearly in eps
        // (predicted J*eps/(2*eps+J) for atom mass J); the gate uses it. The
        // KS medians are reported alongside to document the plateau.
        const double eps_grid[] = {0.1, 0.05, 0.01};
        json trend = json::array();
        double med[3] = {0, 0, 0};
        for (int ei = 0; ei < 3; ++ei) {
            std::vector<double> levys, kss;
            for (int rep = 0; rep < 5; ++rep) {
                std::uint64_t off =
                    1000000ull + 100000ull * static_cast<std::uint64_t>(ei * 5 + rep);
                RegBatchConfig rbe;
                double e2 = eps_grid[ei];
                rbe.reg = RegConfig{e2, gamma, e2 * e2 / 25.0, t, 0.0, opt.seed};
                rbe.first_path = off;
                rbe.n_paths = n;
                rbe.workers = opt.workers;
                std::vector<double> eme = reg_endpoint_batch(rbe);
                StickyEngineConfig lc = lim;
                lc.first_path = 2000000ull + 100000ull * static_cast<std::uint64_t>(ei * 5 + rep);
                std::vector<double> st = sample_sticky_endpoint(lc, t);
                levys.push_back(levy_two_sample(eme, st));
                kss.push_back(ks_two_sample(eme, st).statistic);
            }
            std::sort(levys.begin(), levys.end());
            std::sort(kss.begin(), kss.end());
            med[ei] = levys[2];
            json cell;
            cell["epsilon"] = eps_grid[ei];
            cell["median_levy_distance"] = med[ei];
            cell["median_ks_statistic"] = kss[2];
            trend.push_back(cell);
        }
        bool trend_ok = med[0] >= med[1] && med[1] >= med[2];
        bool dual_ok = dual.p_value > p_gate;
        r.details["dual_route_ks"] = to_json(dual);
        r.details["p_gate"] = p_gate;
        r.details["literal_vs_atomic_limit_ks"] = to_json(literal);
        r.details["trend"] = trend;
        r.details["trend_pass"] = trend_ok;
        r.details["dual_pass"] = dual_ok;
        r.details["note"] =
            "the literal KS distance against the atomic limit law plateaus at "
            "half the atom mass (atomless laws vs an atom at 0) and cannot "
            "shrink; the gate pairs the two discretizations of the same "
            "regularized law plus a shrinking Levy-metric trend";
        r.pass = dual_ok && trend_ok;
    });
}

// ---------------------------------------------------------------------------
// coupling suite: criteria 7-9.

void add_coupling(std::vector<CheckResult>& out, const VerifyOptions& opt) {
    const double gamma = 1.0, b = 1.0;
    const double eps_grid[] = {0.04, 0.02, 0.01};
    const int ns[] = {25, 50, 100};

    // One trial batch per eps feeds both the ladder bound and the occupation
    // ratio checks.
    std::vector<TrialRecord> recs[3];
    bool batch_ok[3] = {false, false, false};
    std::string batch_err[3];
    for (int ei = 0; ei < 3; ++ei) {
        try {
            CoupledTrialConfig tc;
            double eps = eps_grid[ei];
            // Frozen segments (both legs off-band, Z constant) are excised:
            // U_b otherwise inherits the heavy tail of Brownian return times
            // and no finite horizon resolves every trial. The ladder events
            // and J are unchanged in law. The horizon is then a cap on
            // unfrozen time only; any residual unresolved trial is still
            // counted against the bound, making the check stricter.
            tc.reg = RegConfig{eps, gamma, eps * eps / 25.0, 600.0, 0.0, opt.seed};
            tc.excise_freezes = true;
            tc.b = b;
            tc.record_ns = {25, 50, 100};
            tc.first_trial = 1000000ull * static_cast<std::uint64_t>(ei);
            tc.n_trials = scaled(1e4, opt.scale, 500);
            tc.workers = opt.workers;
            recs[ei] = run_coupled_trials(tc);
            batch_ok[ei] = true;
        } catch (const std::exception& e) {
            batch_err[ei] = e.what();
        }
    }

    run_check(out, "07-ladder-bound", [&](CheckResult& r) {
        bool ok = true;
        json cells = json::array();
        for (int ei = 0; ei < 3; ++ei) {
            if (!batch_ok[ei]) throw std::runtime_error(batch_err[ei]);
            if (recs[ei].size() < 1000)
                throw InsufficientSamples("ladder bound needs >= 1000 trials per cell");
            double eps = eps_grid[ei];
            double trials = static_cast<double>(recs[ei].size());
            std::uint64_t censored = 0;
            for (int ni = 0; ni < 3; ++ni) {
                std::uint64_t events = 0;
                censored = 0;
                for (const TrialRecord& t : recs[ei]) {
                    bool s_before = t.s_time[ni] >= 0.0 &&
                                    (t.u_b_time < 0.0 || t.s_time[ni] < t.u_b_time);
                    if (t.censored && !s_before && t.u_b_time < 0.0) {
                        ++censored;
                        ++events;  // unresolved counts against the bound
                    } else if (s_before) {
                        ++events;
                    }
                }
                double p = static_cast<double>(events) / trials;
                double bound = std::pow(1.0 - 2.0 * eps / b, ns[ni]);
                double se = proportion_se(p, trials);
                bool cell = p <= bound + 3.0 * se;
                ok = ok && cell;
                json c;
                c["epsilon"] = eps;
                c["n"] = ns[ni];
                c["p_empirical"] = p;
                c["bound"] = bound;
                c["se"] = se;
                c["censored"] = censored;
                c["pass"] = cell;
                cells.push_back(c);
            }
        }
        r.details["cells"] = cells;
        r.pass = ok;
    });

    run_check(out, "08-occupation-ratio", [&](CheckResult& r) {
        double ratio[3];
        json cells = json::array();
        for (int ei = 0; ei < 3; ++ei) {
            if (!batch_ok[ei]) throw std::runtime_error(batch_err[ei]);
            std::vector<double> j;
            for (const TrialRecord& t : recs[ei])
                if (t.t_time[0] >= 0.0) j.push_back(t.j_at_t[0]);
            if (j.size() < 50)
                throw InsufficientSamples("too few resolved T_25 rungs at eps=" +
                                          std::to_string(eps_grid[ei]));
            ratio[ei] = mc_mean(j).mean / (25.0 * eps_grid[ei]);
            json c;
            c["epsilon"] = eps_grid[ei];
            c["mean_j_t25_over_n_eps"] = ratio[ei];
            c["resolved"] = j.size();
            cells.push_back(c);
        }
        double sorted[3] = {ratio[0], ratio[1], ratio[2]};
        std::sort(sorted, sorted + 3);
        double median = sorted[1];
        bool ok = true;
        for (int ei = 0; ei < 3; ++ei)
            ok = ok && ratio[ei] >= 0.5 * median && ratio[ei] <= 2.0 * median;
        r.details["cells"] = cells;
        r.details["median"] = median;
        r.pass = ok;
    });

    run_check(out, "09-pathwise-uniqueness-failure", [&](CheckResult& r) {
        bool ok = true;
        json cells = json::array();
        for (const DivergenceSetup& setup : kDivergence) {
            RegConfig cfg{setup.epsilon, gamma, setup.epsilon * setup.epsilon / 25.0,
                          setup.horizon, 0.0, opt.seed};
            ExperimentReport rep =
                run_divergence(cfg, b, setup.cal.beta, setup.cal.t0,
                               scaled(4e3, opt.scale, 400), &setup.cal, opt.workers);
            const MCEstimate& p = rep.estimates.at("p_sup_z_ge_b");
            bool cell = p.mean >= 0.2 - 3.0 * p.se;
            ok = ok && cell;
            json c;
            c["epsilon"] = setup.epsilon;
            c["report"] = to_json(rep);
            c["pass"] = cell;
            cells.push_back(c);
        }
        r.details["cells"] = cells;
        r.pass = ok;
    });
}

// ---------------------------------------------------------------------------
// criterion 10: scheduling independence, checked in-process by comparing
// serialized results across worker counts.

void add_determinism(std::vector<CheckResult>& out, const VerifyOptions& opt) {
    run_check(out, "10-determinism", [&](CheckResult& r) {
        auto snapshot = [&](int workers) {
            StickyEngineConfig ec;
            ec.m = SpeedMeasure::lebesgue_plus_atom(1.0);
            ec.spacing = 0.01;
            ec.seed = opt.seed;
            ec.first_path = 3000000;
            ec.n_paths = 2000;
            ec.workers = workers;
            ExitSummary s = exit_statistics(run_sticky_exit(ec, Interval(-1.0, 1.0)));

            CoupledTrialConfig tc;
            tc.reg = RegConfig{0.04, 1.0, 0.04 * 0.04 / 25.0, 5.0, 0.0, opt.seed};
            tc.record_ns = {5};
            tc.first_trial = 3000000;
            tc.n_trials = 500;
            tc.workers = workers;
            std::vector<TrialRecord> recs = run_coupled_trials(tc);
            json j;
            j["exit_mean"] = format_g17(s.mean_exit_time.mean);
            j["exit_var"] = format_g17(s.mean_exit_time.variance);
            j["time_at_zero"] = format_g17(s.mean_time_at_zero.mean);
            json ub = json::array();
            for (const TrialRecord& t : recs) ub.push_back(format_g17(t.u_b_time));
            j["u_b_times"] = ub;
            return j.dump();
        };
        std::string one = snapshot(1);
        std::string three = snapshot(3);
        r.details["bytes"] = one.size();
        r.details["identical"] = (one == three);
        r.pass = one == three;
    });
}

}  // namespace

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    if (suite == "analytic") {
        add_analytic(out, opt);
    } else if (suite == "construction") {
        add_construction(out, opt);
    } else if (suite == "convergence") {
        add_convergence(out, opt);
    } else if (suite == "coupling") {
        add_coupling(out, opt);
    } else if (suite == "determinism") {
        add_determinism(out, opt);
    } else if (suite == "all") {
        add_analytic(out, opt);
        add_construction(out, opt);
        add_convergence(out, opt);
        add_coupling(out, opt);
        add_determinism(out, opt);
    } else {
        throw std::invalid_argument("unknown suite: " + suite);
    }
    return out;
}

json report_json(const std::string& suite, const VerifyOptions& opt,
                 const std::vector<CheckResult>& checks) {
    json j;
    j["suite"] = suite;
    j["seed"] = opt.seed;
    j["full"] = opt.full;
    j["scale"] = opt.scale;
    json arr = json::array();
    for (const CheckResult& c : checks) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["insufficient"] = c.insufficient;
        e["details"] = c.details;
        arr.push_back(e);
    }
    j["checks"] = arr;
    j["all_pass"] = all_pass(checks);
    return j;
}

bool all_pass(const std::vector<CheckResult>& checks) {
    for (const CheckResult& c : checks)
        if (!c.pass && !c.insufficient) return false;
    return true;
}

}  // namespace stickylab
