#include "stickylab/regularized.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stickylab/parallel.hpp"

namespace stickylab {

void validate(const RegConfig& cfg) {
    if (!(cfg.epsilon > 0.0) || !(cfg.gamma > 0.0))
        throw std::invalid_argument("RegConfig: epsilon and gamma must be positive");
    if (cfg.epsilon > cfg.gamma)
        throw std::domain_error("RegConfig: epsilon must not exceed gamma");
    if (!(cfg.step > 0.0) || cfg.step > cfg.epsilon * cfg.epsilon / 25.0)
        throw std::invalid_argument("RegConfig: step must be in (0, epsilon^2/25]");
    if (cfg.horizon < cfg.step)
        throw std::invalid_argument("RegConfig: horizon must be at least one step");
    if (cfg.horizon / cfg.step > 4.0e12)
        throw std::runtime_error("RegConfig: horizon/step ratio exceeds the resource budget");
}

double sigma_eps(double epsilon, double gamma, double x) {
    if (!(epsilon > 0.0) || !(gamma > 0.0) || epsilon > gamma)
        throw std::domain_error("sigma_eps: require 0 < epsilon <= gamma");
    return std::abs(x) <= epsilon ? std::sqrt(epsilon / gamma) : 1.0;
}

namespace {

std::uint64_t step_count(const RegConfig& cfg, const char* what) {
    double n = std::round(cfg.horizon / cfg.step);
    if (n > 2.0e8)
        throw std::runtime_error(std::string(what) +
                                 ": stored path would exceed the memory budget");
    return static_cast<std::uint64_t>(n);
}

}  // namespace

SamplePath simulate_reg(const RegConfig& cfg, std::uint64_t path_index) {
    validate(cfg);
    std::uint64_t n = step_count(cfg, "simulate_reg");
    double root_h = std::sqrt(cfg.step);
    double band_step = std::sqrt(cfg.epsilon / cfg.gamma) * root_h;
    StreamRng rng(cfg.seed, stream_id(StreamPurpose::regularized, path_index));
    SamplePath path;
    path.grid.resize(n + 1);
    path.values.resize(n + 1);
    double x = cfg.x0;
    path.grid[0] = 0.0;
    path.values[0] = x;
    for (std::uint64_t j = 0; j < n; ++j) {
        double xi = rng.normal();
        double s = std::abs(x) <= cfg.epsilon ? band_step : root_h;
        x = x + s * xi;
        path.grid[j + 1] = static_cast<double>(j + 1) * cfg.step;
        path.values[j + 1] = x;
    }
    path.meta = "regularized epsilon=" + std::to_string(cfg.epsilon);
    return path;
}

CoupledPath simulate_coupled(const RegConfig& cfg, std::uint64_t path_index) {
    validate(cfg);
    if (2.0 * cfg.epsilon > cfg.gamma)
        throw std::domain_error("simulate_coupled: require 2*epsilon <= gamma");
    std::uint64_t n = step_count(cfg, "simulate_coupled");
    double root_h = std::sqrt(cfg.step);
    double bx = std::sqrt(cfg.epsilon / cfg.gamma) * root_h;
    double by = std::sqrt(2.0 * cfg.epsilon / cfg.gamma) * root_h;
    StreamRng rng(cfg.seed, stream_id(StreamPurpose::regularized, path_index));
    CoupledPath path;
    path.grid.resize(n + 1);
    path.x_values.resize(n + 1);
    path.y_values.resize(n + 1);
    path.z_values.resize(n + 1);
    double x = cfg.x0, y = cfg.x0;
    path.grid[0] = 0.0;
    path.x_values[0] = x;
    path.y_values[0] = y;
    path.z_values[0] = 0.0;
    for (std::uint64_t j = 0; j < n; ++j) {
        double xi = rng.normal();
        double sx = std::abs(x) <= cfg.epsilon ? bx : root_h;
        double sy = std::abs(y) <= 2.0 * cfg.epsilon ? by : root_h;
        x = x + sx * xi;
        y = y + sy * xi;
        path.grid[j + 1] = static_cast<double>(j + 1) * cfg.step;
        path.x_values[j + 1] = x;
        path.y_values[j + 1] = y;
        path.z_values[j + 1] = x - y;
    }
    return path;
}

std::vector<double> reg_endpoint_batch(const RegBatchConfig& cfg) {
    validate(cfg.reg);
    const Kernels& kern = active_kernels();
    std::uint64_t n_steps =
        static_cast<std::uint64_t>(std::round(cfg.reg.horizon / cfg.reg.step));
    double root_h = std::sqrt(cfg.reg.step);
    LegParams leg{cfg.reg.epsilon, std::sqrt(cfg.reg.epsilon / cfg.reg.gamma) * root_h,
                  root_h};
    std::vector<double> out(cfg.n_paths);
    parallel_blocks(cfg.n_paths, cfg.workers, [&](std::size_t begin, std::size_t end) {
        std::size_t n = end - begin;
        std::vector<double> x(n, cfg.reg.x0), u(n), xi(n);
        std::vector<std::uint64_t> streams(n), ctrs(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            streams[i] =
                stream_id(StreamPurpose::regularized, cfg.first_path + begin + i);
        for (std::uint64_t j = 0; j < n_steps; ++j) {
            kern.uniform_batch(cfg.reg.seed, streams.data(), ctrs.data(), u.data(), n);
            kern.normal_batch(u.data(), xi.data(), n);
            kern.em_step(x.data(), xi.data(), n, leg);
            for (std::size_t i = 0; i < n; ++i) ++ctrs[i];
        }
        for (std::size_t i = 0; i < n; ++i) out[begin + i] = x[i];
    });
    return out;
}

std::vector<ExitSample> reg_exit_batch(const RegBatchConfig& cfg, const Interval& I) {
    validate(cfg.reg);
    if (!I.contains(cfg.reg.x0))
        throw std::domain_error("reg_exit_batch: x0 outside interval");
    const Kernels& kern = active_kernels();
    double h = cfg.reg.step;
    std::uint64_t max_steps = static_cast<std::uint64_t>(std::round(cfg.reg.horizon / h));
    double root_h = std::sqrt(h);
    LegParams leg{cfg.reg.epsilon, std::sqrt(cfg.reg.epsilon / cfg.reg.gamma) * root_h,
                  root_h};
    std::vector<ExitSample> out(cfg.n_paths);
    parallel_blocks(cfg.n_paths, cfg.workers, [&](std::size_t begin, std::size_t end) {
        std::size_t n = end - begin;
        std::vector<double> x(n, cfg.reg.x0), u(n), xi(n);
        std::vector<std::uint64_t> streams(n), ctrs(n, 0);
        std::vector<std::uint64_t> band(n, 0);   // steps spent with |x| <= eps
        std::vector<std::size_t> slot(n);        // global output index per lane
        for (std::size_t i = 0; i < n; ++i) {
            streams[i] =
                stream_id(StreamPurpose::regularized, cfg.first_path + begin + i);
            slot[i] = begin + i;
        }
        std::size_t active = n;
        std::uint64_t iter = 0;
        while (active > 0) {
            // Retire exited / censored lanes, then compact the arrays.
            std::size_t kept = 0;
            for (std::size_t i = 0; i < active; ++i) {
                bool exited = x[i] <= I.a || x[i] >= I.b;
                bool censored = !exited && iter >= max_steps;
                if (exited || censored) {
                    ExitSample s;
                    s.side = exited ? (x[i] <= I.a ? -1 : 1) : 0;
                    s.censored = censored;
                    s.exit_time = static_cast<double>(iter) * h;
                    s.time_at_zero = static_cast<double>(band[i]) * h;
                    out[slot[i]] = s;
                    continue;
                }
                if (std::abs(x[i]) <= cfg.reg.epsilon) ++band[i];
                if (kept != i) {
                    x[kept] = x[i];
                    streams[kept] = streams[i];
                    ctrs[kept] = ctrs[i];
                    band[kept] = band[i];
                    slot[kept] = slot[i];
                }
                ++kept;
            }
            active = kept;
            if (active == 0) break;
            kern.uniform_batch(cfg.reg.seed, streams.data(), ctrs.data(), u.data(), active);
            kern.normal_batch(u.data(), xi.data(), active);
            kern.em_step(x.data(), xi.data(), active, leg);
            for (std::size_t i = 0; i < active; ++i) ++ctrs[i];
            ++iter;
        }
    });
    return out;
}

}  // namespace stickylab
