#include "stickylab/time_change.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stickylab/parallel.hpp"
#include "stickylab/rng.hpp"

namespace stickylab {

namespace {

// Model-time weight of one arrival at a lattice site: spacing times the
// m-measure of the site's cell [site - spacing/2, site + spacing/2). Exact
// for every measure the project uses; Lebesgue gives spacing^2, an atom of
// weight gamma adds gamma * spacing to its cell.
class SiteWeights {
public:
    SiteWeights(const SpeedMeasure& m, double x0, double delta)
        : m_(&m), x0_(x0), delta_(delta) {
        for (const SpeedMeasure::Atom& a : m.atoms()) {
            double k = std::round((a.location - x0) / delta);
            if (std::abs(a.location - (x0 + k * delta)) > 0.5 * delta * (1.0 + 1e-9))
                throw std::domain_error("speed-measure atom at " +
                                        std::to_string(a.location) +
                                        " is farther than spacing/2 from the lattice");
        }
        grow(-64, 65);
    }

    double at(std::int64_t idx) {
        if (idx < lo_ || idx >= lo_ + static_cast<std::int64_t>(cache_.size())) {
            std::int64_t span = static_cast<std::int64_t>(cache_.size());
            std::int64_t lo = std::min(lo_, idx - span);
            std::int64_t hi = std::max(lo_ + span, idx + span + 1);
            grow(lo, hi);
        }
        return cache_[static_cast<std::size_t>(idx - lo_)];
    }

private:
    void grow(std::int64_t lo, std::int64_t hi) {
        std::vector<double> next(static_cast<std::size_t>(hi - lo));
        for (std::int64_t k = lo; k < hi; ++k) {
            if (k >= lo_ && k < lo_ + static_cast<std::int64_t>(cache_.size())) {
                next[static_cast<std::size_t>(k - lo)] =
                    cache_[static_cast<std::size_t>(k - lo_)];
                continue;
            }
            next[static_cast<std::size_t>(k - lo)] = compute(k);
        }
        cache_ = std::move(next);
        lo_ = lo;
    }

    double compute(std::int64_t k) const {
        double x = x0_ + delta_ * static_cast<double>(k);
        double lo = x - 0.5 * delta_, hi = x + 0.5 * delta_;
        double cell = m_->density_mass(lo, hi);
        for (const SpeedMeasure::Atom& a : m_->atoms())
            if (a.location >= lo && a.location < hi) cell += a.weight;
        return delta_ * cell;
    }

    const SpeedMeasure* m_;
    double x0_, delta_;
    std::vector<double> cache_;
    std::int64_t lo_ = 0;
};

// 64 walk directions per Philox draw; bit i%64 of draw i/64 drives step i.
struct BitStream {
    std::uint64_t seed, stream;
    std::uint64_t word = 0;

    int direction(std::uint64_t step) {
        if ((step & 63u) == 0) word = philox_u64(seed, stream, step >> 6);
        return ((word >> (step & 63u)) & 1u) ? 1 : -1;
    }
};

std::int64_t lattice_index(double x, double x0, double delta, const char* what) {
    double k = (x - x0) / delta;
    double kr = std::round(k);
    if (std::abs(k - kr) > 1e-9 * std::max(1.0, std::abs(k)))
        throw std::domain_error(std::string(what) + " is not a lattice point");
    return static_cast<std::int64_t>(kr);
}

}  // namespace

Clock build_clock(const LatticeWalk& walk, const SpeedMeasure& m) {
    SiteWeights weights(m, walk.config.origin, walk.config.spacing);
    Clock clock;
    clock.alphas.resize(walk.positions.size());
    double alpha = 0.0;
    clock.alphas[0] = 0.0;
    for (std::size_t k = 0; k + 1 < walk.positions.size(); ++k) {
        alpha += weights.at(walk.positions[k]);
        clock.alphas[k + 1] = alpha;
    }
    return clock;
}

std::size_t invert_clock(const Clock& clock, double t) {
    if (clock.alphas.empty()) throw std::out_of_range("invert_clock: empty clock");
    if (t < 0.0 || t > clock.alphas.back())
        throw std::out_of_range("invert_clock: time " + std::to_string(t) +
                                " outside [0, " + std::to_string(clock.alphas.back()) + "]");
    auto it = std::upper_bound(clock.alphas.begin(), clock.alphas.end(), t);
    return static_cast<std::size_t>(it - clock.alphas.begin()) - 1;
}

SamplePath sticky_path(const LatticeWalk& walk, const SpeedMeasure& m, double x0,
                       const std::vector<double>& grid) {
    if (x0 != walk.config.origin)
        throw std::invalid_argument("sticky_path: x0 must equal the walk origin");
    for (std::size_t j = 0; j + 1 < grid.size(); ++j)
        if (!(grid[j] < grid[j + 1]))
            throw std::invalid_argument("sticky_path: grid must be strictly increasing");
    Clock clock = build_clock(walk, m);
    SamplePath path;
    path.grid = grid;
    path.values.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        path.values[j] = walk.position_at(invert_clock(clock, grid[j]));
    path.meta = "time-change spacing=" + std::to_string(walk.config.spacing);
    return path;
}

std::vector<ExitSample> run_sticky_exit(const StickyEngineConfig& cfg, const Interval& I,
                                        const std::function<double(double)>& f) {
    if (!(cfg.spacing > 0.0)) throw std::invalid_argument("run_sticky_exit: spacing <= 0");
    if (!I.contains(cfg.x0)) throw std::domain_error("run_sticky_exit: x0 outside interval");
    std::int64_t ia = lattice_index(I.a, cfg.x0, cfg.spacing, "interval endpoint a");
    std::int64_t ib = lattice_index(I.b, cfg.x0, cfg.spacing, "interval endpoint b");

    // Per-site model-time weight and integrand weight, both per arrival.
    SiteWeights weights(cfg.m, cfg.x0, cfg.spacing);
    std::size_t span = static_cast<std::size_t>(ib - ia + 1);
    std::vector<double> w(span), fw(span);
    for (std::int64_t k = ia; k <= ib; ++k) {
        double site = cfg.x0 + cfg.spacing * static_cast<double>(k);
        w[static_cast<std::size_t>(k - ia)] = weights.at(k);
        fw[static_cast<std::size_t>(k - ia)] = f ? weights.at(k) * f(site) : 0.0;
    }
    // Which lattice index shows the value 0 (the sticky site), if any.
    double kz = std::round((0.0 - cfg.x0) / cfg.spacing);
    bool has_zero_site = std::abs(0.0 - (cfg.x0 + kz * cfg.spacing)) < 0.5 * cfg.spacing;
    std::int64_t iz = static_cast<std::int64_t>(kz);

    std::vector<ExitSample> out(cfg.n_paths);
    parallel_blocks(cfg.n_paths, cfg.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            BitStream bits{cfg.seed, stream_id(StreamPurpose::walk, cfg.first_path + i)};
            ExitSample s;
            std::int64_t pos = 0;
            double alpha = 0.0, t0 = 0.0, occ = 0.0;
            std::uint64_t step = 0;
            for (;; ++step) {
                if (pos == ia || pos == ib) {
                    s.side = pos == ia ? -1 : 1;
                    break;
                }
                if (step >= cfg.max_steps) {
                    s.censored = true;
                    break;
                }
                std::size_t idx = static_cast<std::size_t>(pos - ia);
                double wl = w[idx];
                alpha += wl;
                occ += fw[idx];
                if (has_zero_site && pos == iz) t0 += wl;
                pos += bits.direction(step);
            }
            s.exit_time = alpha;
            s.time_at_zero = t0;
            s.occ_f = occ;
            out[i] = s;
        }
    });
    return out;
}

std::vector<double> sample_sticky_endpoint(const StickyEngineConfig& cfg, double t) {
    if (!(cfg.spacing > 0.0) || !(t >= 0.0))
        throw std::invalid_argument("sample_sticky_endpoint: bad parameters");
    std::vector<double> out(cfg.n_paths, std::numeric_limits<double>::quiet_NaN());
    parallel_blocks(cfg.n_paths, cfg.workers, [&](std::size_t begin, std::size_t end) {
        SiteWeights weights(cfg.m, cfg.x0, cfg.spacing);  // grows per worker
        for (std::size_t i = begin; i < end; ++i) {
            BitStream bits{cfg.seed, stream_id(StreamPurpose::walk, cfg.first_path + i)};
            std::int64_t pos = 0;
            double alpha = 0.0;
            for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
                double wl = weights.at(pos);
                if (alpha + wl > t) {
                    out[i] = cfg.x0 + cfg.spacing * static_cast<double>(pos);
                    break;
                }
                alpha += wl;
                pos += bits.direction(step);
            }
        }
    });
    return out;
}

std::vector<IdentityStats> run_identity_stats(const StickyEngineConfig& cfg, double t,
                                              double dt) {
    if (!(dt > 0.0) || !(t > 0.0))
        throw std::invalid_argument("run_identity_stats: t and dt must be positive");
    std::uint64_t n_grid = static_cast<std::uint64_t>(std::llround(t / dt));
    if (std::abs(static_cast<double>(n_grid) * dt - t) > 1e-9 * t)
        throw std::invalid_argument("run_identity_stats: dt must divide t");
    double kz = std::round((0.0 - cfg.x0) / cfg.spacing);
    bool has_zero_site = std::abs(0.0 - (cfg.x0 + kz * cfg.spacing)) < 0.5 * cfg.spacing;
    std::int64_t iz = static_cast<std::int64_t>(kz);

    std::vector<IdentityStats> out(cfg.n_paths);
    parallel_blocks(cfg.n_paths, cfg.workers, [&](std::size_t begin, std::size_t end) {
        SiteWeights weights(cfg.m, cfg.x0, cfg.spacing);
        for (std::size_t i = begin; i < end; ++i) {
            BitStream bits{cfg.seed, stream_id(StreamPurpose::walk, cfg.first_path + i)};
            IdentityStats st;
            std::int64_t pos = 0;
            double alpha = 0.0, qv = 0.0, toff = 0.0, mart = 0.0;
            double prev_val = cfg.x0;
            std::uint64_t next_j = 1;
            std::uint64_t step = 0;
            for (;; ++step) {
                if (step >= cfg.max_steps) {
                    st.censored = true;
                    break;
                }
                double wl = weights.at(pos);
                double alpha_next = alpha + wl;
                double x = cfg.x0 + cfg.spacing * static_cast<double>(pos);
                while (next_j <= n_grid && static_cast<double>(next_j) * dt < alpha_next) {
                    if (prev_val != 0.0) {
                        double d = x - prev_val;
                        qv += d * d;
                        toff += dt;
                    }
                    prev_val = x;
                    ++next_j;
                }
                if (alpha_next > t) break;  // grid exhausted too: every point <= t
                int dir = bits.direction(step);
                if (has_zero_site && pos == iz) mart += cfg.spacing * dir;
                pos += dir;
                alpha = alpha_next;
            }
            st.qv_dev = std::abs(qv - toff);
            st.time_off_zero = toff;
            st.mart_abs = std::abs(mart);
            out[i] = st;
        }
    });
    return out;
}

}  // namespace stickylab
