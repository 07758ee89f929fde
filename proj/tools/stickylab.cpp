// stickylab: Monte Carlo laboratory for sticky-point diffusions.
//
// Commands
//   analytic   closed-form exit-time / occupation tables for a speed measure
//   simulate   sample paths or endpoint samples (time-change or regularized)
//   couple     one coupled pair (X, Y, Z = X - Y) with its threshold ladder
//   verify     the acceptance suites; exit 0 iff every check passes
//   calibrate  pilot-based constants for the divergence experiment
//
// All randomness is counter-based: outputs are a pure function of the master
// seed and per-path indices, independent of worker count or scheduling.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stickylab/config.hpp"
#include "stickylab/coupling.hpp"
#include "stickylab/parallel.hpp"
#include "stickylab/regularized.hpp"
#include "stickylab/report.hpp"
#include "stickylab/rng.hpp"
#include "stickylab/speed_measure.hpp"
#include "stickylab/stats.hpp"
#include "stickylab/time_change.hpp"
#include "stickylab/verify.hpp"

namespace {

using namespace stickylab;

/// Signals a malformed request (bad flag/config combination): exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;  // 0: resolve via STICKYLAB_WORKERS / hardware
    std::string out_dir = ".";
    std::string format = "csv";
};

Config load_config(const GlobalOpts& g) {
    Config cfg;
    if (!g.config_path.empty()) {
        try {
            cfg = Config::load(g.config_path);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }
    // Flags override file values.
    if (g.seed_set) cfg.set("seed", std::to_string(g.seed));
    if (g.workers > 0) cfg.set("workers", std::to_string(g.workers));
    return cfg;
}

std::uint64_t require_seed(const Config& cfg) {
    if (!cfg.has("seed"))
        throw UsageError("a master seed is required (--seed or `seed =` in the config); "
                         "wall-clock seeding is deliberately unsupported");
    return cfg.get_u64("seed", 0);
}

SpeedMeasure measure_from(const Config& cfg) {
    std::string text = cfg.section_text("measure");
    if (!text.empty()) return SpeedMeasure::from_text(text);
    return SpeedMeasure::lebesgue_plus_atom(cfg.get_double("gamma", 1.0));
}

std::filesystem::path out_file(const GlobalOpts& g, const std::string& name) {
    std::filesystem::create_directories(g.out_dir);
    return std::filesystem::path(g.out_dir) / name;
}

json base_manifest(const Config& cfg, const std::string& command) {
    json m;
    m["tool"] = "stickylab";
    m["command"] = command;
    json params;
    for (const auto& [k, v] : cfg.entries()) params[k] = v;
    m["config"] = params;
    return m;
}

void emit(const GlobalOpts& g, const Config& cfg, const std::string& command,
          const std::string& name, const std::string& content) {
    auto path = out_file(g, name);
    write_text_file(path.string(), content);
    write_manifest(path.string(), base_manifest(cfg, command));
    std::cout << "wrote " << path.string() << "\n";
}

// ---------------------------------------------------------------------------

int cmd_analytic(const GlobalOpts& g) {
    Config cfg = load_config(g);
    SpeedMeasure m = measure_from(cfg);
    Interval I(cfg.get_double("interval.a", -1.0), cfg.get_double("interval.b", 1.0));

    std::vector<double> xs;
    if (cfg.has("x")) {
        xs.push_back(cfg.get_double("x", 0.0));
    } else {
        int count = cfg.get_int("grid.count", 41);
        if (count < 2) throw UsageError("grid.count must be >= 2");
        for (int i = 0; i < count; ++i)
            xs.push_back(I.a + I.length() * i / (count - 1));
    }
    for (double x : xs)
        if (!I.contains(x))
            throw UsageError("x = " + format_g17(x) + " lies outside the interval");

    std::vector<double> probes;
    {
        std::string p = cfg.get_string("probes", "0");
        std::size_t pos = 0;
        while (pos < p.size()) {
            std::size_t comma = p.find(',', pos);
            std::string tok = p.substr(pos, comma == std::string::npos ? comma : comma - pos);
            if (!tok.empty()) probes.push_back(std::stod(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }

    std::string header = "x,G";
    for (double y : probes) header += ",g_at_" + format_g17(y);
    std::string csv = header + "\n";
    json rows = json::array();
    for (double x : xs) {
        double G = expected_exit_time(m, I, x, true);
        std::string line = format_g17(x) + "," + format_g17(G);
        json row;
        row["x"] = x;
        row["G"] = G;
        json gs = json::array();
        for (double y : probes) {
            double gv = green_kernel(I, x, y);
            line += "," + format_g17(gv);
            gs.push_back(gv);
        }
        row["g_at_probes"] = gs;
        rows.push_back(row);
        csv += line + "\n";
    }

    if (g.format == "json") {
        json doc;
        doc["interval"] = {I.a, I.b};
        doc["measure"] = m.to_text();
        doc["rows"] = rows;
        emit(g, cfg, "analytic", "analytic.json", doc.dump(2) + "\n");
    } else {
        emit(g, cfg, "analytic", "analytic.csv", csv);
        std::cout << csv;
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const GlobalOpts& g) {
    Config cfg = load_config(g);
    std::uint64_t seed = require_seed(cfg);
    int workers = resolve_workers(cfg.get_int("workers", 0));
    std::string method = cfg.get_string("method", "time-change");
    std::string output = cfg.get_string("output", "endpoints");
    double horizon = cfg.get_double("horizon", 1.0);
    std::uint64_t paths = cfg.get_u64("paths", 1000);
    std::uint64_t first = cfg.get_u64("first_path", 0);
    if (horizon <= 0.0 || paths == 0) throw UsageError("horizon and paths must be positive");

    if (output == "endpoints") {
        std::vector<double> values;
        if (method == "time-change") {
            StickyEngineConfig ec;
            ec.m = measure_from(cfg);
            ec.x0 = cfg.get_double("x0", 0.0);
            ec.spacing = cfg.get_double("spacing", 0.005);
            ec.seed = seed;
            ec.first_path = first;
            ec.n_paths = paths;
            ec.workers = workers;
            values = sample_sticky_endpoint(ec, horizon);
        } else if (method == "regularized") {
            RegBatchConfig rb;
            double eps = cfg.get_double("epsilon", 0.01);
            rb.reg = RegConfig{eps, cfg.get_double("gamma", 1.0),
                               cfg.get_double("step", eps * eps / 25.0), horizon,
                               cfg.get_double("x0", 0.0), seed};
            rb.first_path = first;
            rb.n_paths = paths;
            rb.workers = workers;
            values = reg_endpoint_batch(rb);
        } else {
            throw UsageError("method must be time-change or regularized");
        }
        if (g.format == "json") {
            json doc;
            doc["horizon"] = horizon;
            doc["values"] = values;
            emit(g, cfg, "simulate", "endpoints.json", doc.dump(2) + "\n");
        } else {
            std::string csv = "path,x_t\n";
            for (std::uint64_t i = 0; i < values.size(); ++i)
                csv += std::to_string(first + i) + "," + format_g17(values[i]) + "\n";
            emit(g, cfg, "simulate", "endpoints.csv", csv);
        }
        return 0;
    }

    if (output != "paths") throw UsageError("output must be endpoints or paths");
    if (paths > 100) throw UsageError("per-path CSV output is capped at 100 paths");
    double dt = cfg.get_double("grid.dt", horizon / 1000.0);
    std::vector<double> grid;
    for (double t = 0.0; t <= horizon + 1e-12; t += dt) grid.push_back(std::min(t, horizon));
    for (std::uint64_t i = 0; i < paths; ++i) {
        SamplePath path;
        if (method == "time-change") {
            SpeedMeasure m = measure_from(cfg);
            double spacing = cfg.get_double("spacing", 0.005);
            double x0 = cfg.get_double("x0", 0.0);
            WalkConfig wc;
            wc.spacing = spacing;
            wc.origin = x0;
            wc.seed = seed;
            wc.stream = stream_id(StreamPurpose::walk, first + i);
            wc.steps = static_cast<std::uint64_t>(horizon / (spacing * spacing)) + 1024;
            for (;;) {
                LatticeWalk walk = simulate_walk(wc);
                Clock clock = build_clock(walk, m);
                if (clock.alphas.back() >= horizon) {
                    path = sticky_path(walk, m, x0, grid);
                    break;
                }
                wc.steps *= 2;  // clock ran slow (heavy sticky site); extend
            }
        } else if (method == "regularized") {
            double eps = cfg.get_double("epsilon", 0.01);
            RegConfig rc{eps, cfg.get_double("gamma", 1.0),
                         cfg.get_double("step", eps * eps / 25.0), horizon,
                         cfg.get_double("x0", 0.0), seed};
            path = simulate_reg(rc, first + i);
        } else {
            throw UsageError("method must be time-change or regularized");
        }
        char name[64];
        std::snprintf(name, sizeof(name), "path_%06llu.csv",
                      static_cast<unsigned long long>(first + i));
        emit(g, cfg, "simulate", name, csv_sample_path(path));
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_couple(const GlobalOpts& g) {
    Config cfg = load_config(g);
    std::uint64_t seed = require_seed(cfg);
    double eps = cfg.get_double("epsilon", 0.02);
    double b = cfg.get_double("b", 1.0);
    RegConfig rc{eps, cfg.get_double("gamma", 1.0),
                 cfg.get_double("step", eps * eps / 25.0), cfg.get_double("horizon", 10.0),
                 cfg.get_double("x0", 0.0), seed};
    std::uint64_t index = cfg.get_u64("path", 0);

    CoupledPath path = simulate_coupled(rc, index);
    StoppingLedger ledger = detect_ledger(path, eps, b);
    std::vector<double> J = occupation_J(path, eps);

    json rep;
    rep["epsilon"] = eps;
    rep["b"] = b;
    rep["path_index"] = index;
    json s = json::array(), t = json::array();
    for (std::size_t k : ledger.s_times) s.push_back(path.grid[k]);
    for (std::size_t k : ledger.t_times) t.push_back(path.grid[k]);
    rep["s_times"] = s;
    rep["t_times"] = t;
    rep["u_b_time"] = ledger.u_b < 0 ? json(nullptr)
                                     : json(path.grid[static_cast<std::size_t>(ledger.u_b)]);
    rep["j_final"] = J.back();

    if (g.format == "json") {
        json doc = rep;
        doc["grid"] = path.grid;
        doc["x"] = path.x_values;
        doc["y"] = path.y_values;
        doc["z"] = path.z_values;
        emit(g, cfg, "couple", "couple.json", doc.dump(2) + "\n");
    } else {
        emit(g, cfg, "couple", "couple.csv", csv_coupled_path(path));
        emit(g, cfg, "couple", "couple.report.json", rep.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_verify(const GlobalOpts& g, const std::string& suite, bool full, double scale) {
    Config cfg = load_config(g);
    VerifyOptions opt;
    if (cfg.has("seed")) opt.seed = cfg.get_u64("seed", opt.seed);
    opt.workers = resolve_workers(cfg.get_int("workers", 0));
    opt.full = full || cfg.get_string("budget", "") == "full";
    opt.scale = scale > 0.0 ? scale : cfg.get_double("scale", 1.0);

    std::vector<CheckResult> checks;
    try {
        checks = run_suite(suite, opt);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    for (const CheckResult& c : checks) {
        const char* tag = c.pass ? "PASS" : (c.insufficient ? "INSUFF" : "FAIL");
        std::cout << "[" << tag << "] " << c.name;
        if (!c.pass) std::cout << "  " << c.details.dump();
        std::cout << "\n";
    }
    json rep = report_json(suite, opt, checks);
    auto path = out_file(g, "verify_" + suite + ".json");
    write_text_file(path.string(), rep.dump(2) + "\n");
    write_manifest(path.string(), base_manifest(cfg, "verify " + suite));
    bool ok = all_pass(checks);
    std::cout << (ok ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << "\n";
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_calibrate(const GlobalOpts& g) {
    Config cfg = load_config(g);
    std::uint64_t seed = require_seed(cfg);
    int workers = resolve_workers(cfg.get_int("workers", 0));
    double eps = cfg.get_double("epsilon", 0.02);
    RegConfig rc{eps, cfg.get_double("gamma", 1.0),
                 cfg.get_double("step", eps * eps / 25.0), cfg.get_double("horizon", 60.0),
                 cfg.get_double("x0", 0.0), seed};
    double eta = cfg.get_double("eta", 0.2);

    Calibration cal = calibrate(rc, eta, workers);
    json doc;
    doc["epsilon"] = eps;
    doc["eta"] = eta;
    doc["beta"] = cal.beta;
    doc["c1"] = cal.c1;
    doc["K"] = cal.K;
    doc["R"] = cal.R;
    doc["t0"] = cal.t0;
    std::cout << doc.dump(2) << "\n";
    emit(g, cfg, "calibrate", "calibration.json", doc.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo laboratory for sticky-point diffusions"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "key = value run configuration file");
    auto* seed_opt = app.add_option("--seed", g.seed, "master seed (mandatory for sampling)");
    app.add_option("--workers", g.workers,
                   "worker threads (fallback: STICKYLAB_WORKERS, then hardware)");
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    auto* analytic = app.add_subcommand("analytic", "closed-form exit-time tables");
    auto* simulate = app.add_subcommand("simulate", "sample paths / endpoint samples");
    auto* couple = app.add_subcommand("couple", "one coupled pair with its ladder");
    auto* verify = app.add_subcommand("verify", "run an acceptance suite");
    auto* calibrate = app.add_subcommand("calibrate", "divergence-experiment constants");

    std::string suite = "all";
    bool full = false;
    double scale = 0.0;
    verify->add_option("--suite", suite,
                       "analytic | construction | convergence | coupling | all")
        ->capture_default_str();
    verify->add_flag("--full", full, "full sample budgets");
    verify->add_option("--scale", scale, "trial-count multiplier (development runs)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    g.seed_set = seed_opt->count() > 0;
    try {
        if (analytic->parsed()) return cmd_analytic(g);
        if (simulate->parsed()) return cmd_simulate(g);
        if (couple->parsed()) return cmd_couple(g);
        if (verify->parsed()) return cmd_verify(g, suite, full, scale);
        if (calibrate->parsed()) return cmd_calibrate(g);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
