#include <cmath>

#include <doctest.h>

#include "stickylab/speed_measure.hpp"

using namespace stickylab;

TEST_CASE("green kernel closed form") {
    Interval I(-1.0, 1.0);
    CHECK(green_kernel(I, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(green_kernel(I, -1.0, 0.3) == 0.0);
    CHECK(green_kernel(I, 0.3, 1.0) == 0.0);
    CHECK(green_kernel(Interval(0.0, 2.0), 0.5, 1.5) == doctest::Approx(0.25).epsilon(1e-14));

    // symmetric and nonnegative
    for (double x : {-0.9, -0.2, 0.0, 0.4, 0.99}) {
        for (double y : {-0.7, 0.0, 0.3, 0.8}) {
            CHECK(green_kernel(I, x, y) == green_kernel(I, y, x));
            CHECK(green_kernel(I, x, y) >= 0.0);
        }
    }
}

TEST_CASE("measure mass") {
    CHECK(SpeedMeasure::lebesgue().mass(Interval(0.0, 5.0), true) ==
          doctest::Approx(5.0).epsilon(1e-14));
    CHECK(SpeedMeasure::lebesgue_plus_atom(1.0).mass(Interval(-1.0, 1.0), true) ==
          doctest::Approx(3.0).epsilon(1e-14));
    // dy + (1/0.1) dy on [-0.1, 0.1]: 2 + 10 * 0.2 = 4
    CHECK(SpeedMeasure::band_regularized(0.1, 1.0).mass(Interval(-1.0, 1.0), true) ==
          doctest::Approx(4.0).epsilon(1e-14));
    // endpoint atom excluded unless asked for
    SpeedMeasure m({}, {}, 1.0, {{1.0, 0.5}});
    CHECK(m.mass(Interval(-1.0, 1.0), true) == doctest::Approx(2.5));
    CHECK(m.mass(Interval(-1.0, 1.0), false) == doctest::Approx(2.0));
    CHECK(m.has_endpoint_atom(Interval(-1.0, 1.0)));
    CHECK_FALSE(m.has_endpoint_atom(Interval(-1.0, 0.5)));
}

TEST_CASE("density mass is exact across breakpoints") {
    SpeedMeasure m({-0.5, 0.0, 0.5}, {2.0, 3.0}, 1.0, {});
    // pieces: level 1 below -0.5, 2 on [-0.5,0), 3 on [0,0.5), 1 above
    CHECK(m.density_mass(-1.0, 1.0) ==
          doctest::Approx(0.5 * 1 + 0.5 * 2 + 0.5 * 3 + 0.5 * 1).epsilon(1e-14));
    CHECK(m.density_mass(-0.25, 0.25) == doctest::Approx(0.25 * 2 + 0.25 * 3).epsilon(1e-14));
    CHECK(m.density_at(-0.25) == 2.0);
    CHECK(m.density_at(0.25) == 3.0);
    CHECK(m.density_at(-2.0) == 1.0);
}

TEST_CASE("expected exit time") {
    // Lebesgue: G(x) = (x-a)(b-x)
    for (double x : {0.0, 0.25, 0.5, 0.9}) {
        CHECK(expected_exit_time(SpeedMeasure::lebesgue(), Interval(0.0, 1.0), x) ==
              doctest::Approx(x * (1.0 - x)).epsilon(1e-13));
    }
    // sticky atom at the start point: G(0) = 1 + gamma on [-1, 1]
    CHECK(expected_exit_time(SpeedMeasure::lebesgue_plus_atom(1.0), Interval(-1, 1), 0.0) ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(expected_exit_time(SpeedMeasure::lebesgue_plus_atom(0.5), Interval(-1, 1), 0.0) ==
          doctest::Approx(1.5).epsilon(1e-13));
    // boundary start exits immediately
    CHECK(expected_exit_time(SpeedMeasure::lebesgue_plus_atom(1.0), Interval(-1, 1), 1.0) ==
          0.0);
    // an interior atom elsewhere contributes gamma * g(x, loc)
    double base = expected_exit_time(SpeedMeasure::lebesgue(), Interval(-1, 1), 0.3);
    double with = expected_exit_time(SpeedMeasure::lebesgue_plus_atom(0.2, 0.5),
                                     Interval(-1, 1), 0.3);
    CHECK(with == doctest::Approx(base + 0.2 * green_kernel(Interval(-1, 1), 0.3, 0.5))
                      .epsilon(1e-13));
    // endpoint atoms are rejected unless explicitly allowed
    SpeedMeasure bad({}, {}, 1.0, {{1.0, 0.5}});
    CHECK_THROWS(expected_exit_time(bad, Interval(-1, 1), 0.0));
    CHECK(expected_exit_time(bad, Interval(-1, 1), 0.0, true) == doctest::Approx(1.0));
}

TEST_CASE("occupation functional") {
    SpeedMeasure m = SpeedMeasure::lebesgue_plus_atom(1.0);
    Interval I(-1.0, 1.0);
    // f = 1_{y=0} picks out the atom: gamma * g(0,0) = 1
    OccupationQuery at_zero{I, 0.0, [](double y) { return y == 0.0 ? 1.0 : 0.0; }};
    CHECK(occupation_functional(m, at_zero) == doctest::Approx(1.0).epsilon(1e-8));
    // f = 1 recovers the expected exit time
    OccupationQuery one{I, 0.0, [](double) { return 1.0; }};
    CHECK(occupation_functional(m, one) ==
          doctest::Approx(expected_exit_time(m, I, 0.0)).epsilon(1e-9));
    // indicator of [0.2, 0.5] under Lebesgue: int (1-y) dy over [0.2, 0.5]
    OccupationQuery band{I, 0.0,
                         [](double y) { return (y >= 0.2 && y <= 0.5) ? 1.0 : 0.0; }};
    CHECK(occupation_functional(SpeedMeasure::lebesgue(), band) ==
          doctest::Approx(0.195).epsilon(1e-8));
}

TEST_CASE("text round trip") {
    SpeedMeasure m({-0.1, 0.1}, {11.0}, 1.0, {{0.25, 0.5}});
    SpeedMeasure back = SpeedMeasure::from_text(m.to_text());
    CHECK(back.breakpoints() == m.breakpoints());
    CHECK(back.levels() == m.levels());
    CHECK(back.default_level() == m.default_level());
    REQUIRE(back.atoms().size() == 1);
    CHECK(back.atoms()[0].location == 0.25);
    CHECK(back.atoms()[0].weight == 0.5);
}

TEST_CASE("invalid measures throw") {
    CHECK_THROWS(SpeedMeasure({}, {}, 0.0, {}));                  // zero density
    CHECK_THROWS(SpeedMeasure({0.0, 1.0}, {-1.0}, 1.0, {}));      // negative level
    CHECK_THROWS(SpeedMeasure({1.0, 0.0}, {1.0}, 1.0, {}));       // unsorted breakpoints
    CHECK_THROWS(SpeedMeasure({}, {}, 1.0, {{0.0, -0.5}}));       // negative atom
    CHECK_THROWS(Interval(1.0, 1.0));
}
