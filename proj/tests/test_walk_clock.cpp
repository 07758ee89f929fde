#include <cmath>
#include <vector>

#include <doctest.h>

#include "stickylab/lattice_walk.hpp"
#include "stickylab/rng.hpp"
#include "stickylab/stats.hpp"
#include "stickylab/time_change.hpp"

using namespace stickylab;

namespace {

LatticeWalk synthetic_walk(double spacing, double origin,
                           const std::vector<std::int64_t>& positions) {
    LatticeWalk w;
    w.config.spacing = spacing;
    w.config.origin = origin;
    w.config.steps = positions.size() - 1;
    w.positions = positions;
    for (std::int64_t p : positions) ++w.visit_counts[p];
    return w;
}

}  // namespace

TEST_CASE("walk basics") {
    WalkConfig cfg{0.01, 100000, 0.0, 42, stream_id(StreamPurpose::walk, 0)};
    LatticeWalk walk = simulate_walk(cfg);
    REQUIRE(walk.positions.size() == cfg.steps + 1);
    CHECK(walk.positions[0] == 0);
    std::uint64_t ups = 0, visits = 0;
    for (std::size_t i = 1; i < walk.positions.size(); ++i) {
        std::int64_t d = walk.positions[i] - walk.positions[i - 1];
        CHECK((d == 1 || d == -1));
        if (d == 1) ++ups;
    }
    for (const auto& [site, count] : walk.visit_counts) visits += count;
    CHECK(visits == cfg.steps + 1);
    // unbiased steps: 3 sigma band around 1/2
    double frac = static_cast<double>(ups) / static_cast<double>(cfg.steps);
    CHECK(std::abs(frac - 0.5) < 3.0 * 0.5 / std::sqrt(static_cast<double>(cfg.steps)));

    // deterministic in (seed, stream); different streams differ
    LatticeWalk again = simulate_walk(cfg);
    CHECK(again.positions == walk.positions);
    WalkConfig other = cfg;
    other.stream = stream_id(StreamPurpose::walk, 1);
    CHECK(simulate_walk(other).positions != walk.positions);
}

TEST_CASE("local time at a site") {
    WalkConfig cfg{0.5, 16, 1.0, 7, stream_id(StreamPurpose::walk, 3)};
    LatticeWalk walk = simulate_walk(cfg);
    std::uint64_t arrivals = 0;
    for (std::size_t k = 0; k <= 16; ++k)
        if (walk.positions[k] == 0) ++arrivals;
    CHECK(local_time_at(walk, 1.0, 16) ==
          doctest::Approx(0.5 * static_cast<double>(arrivals)));
    CHECK_THROWS_AS(local_time_at(walk, 1.3, 16), std::domain_error);
    CHECK_THROWS_AS(local_time_at(walk, 1.0, 17), std::out_of_range);
}

TEST_CASE("local time matches the Brownian oracle") {
    // E L_1(0) = sqrt(2/pi) for Brownian motion; the walk approximation has
    // O(spacing) bias.
    const double delta = 0.01;
    const std::uint64_t steps = 10000;  // model time 1
    std::vector<double> samples;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        WalkConfig cfg{delta, steps, 0.0, 20260823,
                       stream_id(StreamPurpose::generic, 50000 + i)};
        samples.push_back(local_time_at(simulate_walk(cfg), 0.0, steps));
    }
    MCEstimate est = mc_mean(samples);
    double target = std::sqrt(2.0 / 3.14159265358979323846);
    CHECK(std::abs(est.mean - target) < est.ci_half_width + 0.02);
}

TEST_CASE("clock with Lebesgue measure is k * spacing^2") {
    WalkConfig cfg{0.02, 500, 0.0, 11, stream_id(StreamPurpose::walk, 9)};
    LatticeWalk walk = simulate_walk(cfg);
    Clock clock = build_clock(walk, SpeedMeasure::lebesgue());
    REQUIRE(clock.alphas.size() == 501);
    for (std::size_t k = 0; k <= 500; ++k)
        CHECK(clock.alphas[k] ==
              doctest::Approx(static_cast<double>(k) * 0.02 * 0.02).epsilon(1e-9));
}

TEST_CASE("clock weights the sticky site by its cell mass") {
    // spacing 1, atom of weight 1 at the origin: w(0) = 1*(1+1) = 2, w(+-1) = 1
    LatticeWalk walk = synthetic_walk(1.0, 0.0, {0, 1, 0, -1});
    Clock clock = build_clock(walk, SpeedMeasure::lebesgue_plus_atom(1.0));
    REQUIRE(clock.alphas.size() == 4);
    CHECK(clock.alphas[0] == 0.0);
    CHECK(clock.alphas[1] == doctest::Approx(2.0));
    CHECK(clock.alphas[2] == doctest::Approx(3.0));
    CHECK(clock.alphas[3] == doctest::Approx(5.0));
}

TEST_CASE("clock inversion") {
    Clock clock{{0.0, 1.0, 2.0, 4.0}};
    CHECK(invert_clock(clock, 0.0) == 0);
    CHECK(invert_clock(clock, 0.5) == 0);
    CHECK(invert_clock(clock, 1.0) == 1);
    CHECK(invert_clock(clock, 2.0) == 2);
    CHECK(invert_clock(clock, 3.5) == 2);
    CHECK(invert_clock(clock, 4.0) == 3);
    CHECK_THROWS_AS(invert_clock(clock, -0.1), std::out_of_range);
    CHECK_THROWS_AS(invert_clock(clock, 4.1), std::out_of_range);
}

TEST_CASE("sticky path reproduces the walk under Lebesgue time") {
    WalkConfig cfg{0.1, 50, 0.0, 3, stream_id(StreamPurpose::walk, 17)};
    LatticeWalk walk = simulate_walk(cfg);
    // sample mid-interval: step k is on display during [k, k+1) * spacing^2
    std::vector<double> grid;
    for (int k = 0; k < 50; ++k) grid.push_back((k + 0.5) * 0.1 * 0.1);
    SamplePath path = sticky_path(walk, SpeedMeasure::lebesgue(), 0.0, grid);
    REQUIRE(path.values.size() == 50);
    for (std::size_t k = 0; k < 50; ++k)
        CHECK(path.values[k] == doctest::Approx(walk.position_at(k)));
    CHECK_THROWS_AS(sticky_path(walk, SpeedMeasure::lebesgue(), 0.5, grid),
                    std::invalid_argument);
}

TEST_CASE("streaming exit engine agrees with a stored-walk replay") {
    StickyEngineConfig cfg;
    cfg.m = SpeedMeasure::lebesgue_plus_atom(1.0);
    cfg.spacing = 0.25;
    cfg.seed = 5;
    cfg.first_path = 123;
    cfg.n_paths = 16;
    std::vector<ExitSample> got = run_sticky_exit(cfg, Interval(-1.0, 1.0));
    REQUIRE(got.size() == 16);
    for (std::uint64_t i = 0; i < 16; ++i) {
        // replay with the stored walk and the clock
        WalkConfig wc{0.25, 4096, 0.0, 5, stream_id(StreamPurpose::walk, 123 + i)};
        LatticeWalk walk = simulate_walk(wc);
        Clock clock = build_clock(walk, cfg.m);
        std::size_t exit_step = 0;
        while (exit_step < 4096 && std::abs(walk.position_at(exit_step)) < 1.0) ++exit_step;
        REQUIRE(std::abs(walk.position_at(exit_step)) >= 1.0);
        CHECK(got[i].side == (walk.position_at(exit_step) < 0 ? -1 : 1));
        CHECK(got[i].exit_time == doctest::Approx(clock.alphas[exit_step]).epsilon(1e-12));
        // time at 0: sum of w(0) over pre-exit arrivals at the origin
        double w0 = 0.25 * (0.25 + 1.0);
        std::uint64_t zero_arrivals = 0;
        for (std::size_t k = 0; k < exit_step; ++k)
            if (walk.positions[k] == 0) ++zero_arrivals;
        CHECK(got[i].time_at_zero ==
              doctest::Approx(w0 * static_cast<double>(zero_arrivals)).epsilon(1e-12));
    }
}

TEST_CASE("endpoint sampler is deterministic and worker-invariant") {
    StickyEngineConfig cfg;
    cfg.m = SpeedMeasure::lebesgue_plus_atom(1.0);
    cfg.spacing = 0.05;
    cfg.seed = 9;
    cfg.n_paths = 64;
    cfg.workers = 1;
    std::vector<double> a = sample_sticky_endpoint(cfg, 0.5);
    cfg.workers = 3;
    std::vector<double> b = sample_sticky_endpoint(cfg, 0.5);
    CHECK(a == b);
}
