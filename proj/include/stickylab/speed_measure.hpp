#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace stickylab {

/// Closed finite interval [a, b] with a < b.
struct Interval {
    double a;
    double b;

    Interval(double a_, double b_);

    double length() const { return b - a; }
    bool contains(double x) const { return a <= x && x <= b; }
    bool interior_contains(double x) const { return a < x && x < b; }
};

/// Thrown when an adaptive quadrature fails to reach the requested tolerance.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A speed measure m(dy) = rho(y) dy + sum_i w_i delta_{a_i}(dy), where rho is
/// piecewise constant. Every finite open interval must carry strictly positive
/// finite mass, so all density levels are required to be > 0.
class SpeedMeasure {
public:
    struct Atom {
        double location;
        double weight;
    };

    /// Plain Lebesgue measure dy.
    static SpeedMeasure lebesgue();

    /// dy + gamma * delta_0, the sticky measure.
    static SpeedMeasure lebesgue_plus_atom(double gamma, double location = 0.0);

    /// dy + (gamma/eps) 1_{[-eps,eps]}(y) dy, the regularized band measure.
    static SpeedMeasure band_regularized(double eps, double gamma);

    /// breakpoints: sorted, strictly increasing; levels[i] applies on
    /// [breakpoints[i], breakpoints[i+1]); default_level applies outside the
    /// breakpoint span. With n breakpoints there are n-1 interior levels.
    SpeedMeasure(std::vector<double> breakpoints, std::vector<double> levels,
                 double default_level, std::vector<Atom> atoms);

    double density_at(double x) const;
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& levels() const { return levels_; }
    double default_level() const { return default_level_; }

    /// Density mass over I plus atom weights inside; endpoint atoms counted
    /// only when include_endpoints is set.
    double mass(const Interval& I, bool include_endpoints) const;

    /// Integral of the density alone over [lo, hi] (exact, piecewise constant).
    double density_mass(double lo, double hi) const;

    bool has_endpoint_atom(const Interval& I) const;

    /// Key-value text format understood by the CLI config loader.
    std::string to_text() const;
    static SpeedMeasure from_text(const std::string& text);

private:
    std::vector<double> breakpoints_;
    std::vector<double> levels_;
    double default_level_;
    std::vector<Atom> atoms_;  // sorted by location
};

/// g_I(x,y) = 2 (x^- - a)(b - x^+) / (b - a) with x^- = min(x,y), x^+ = max.
/// Symmetric, nonnegative, zero when either argument is an endpoint.
double green_kernel(const Interval& I, double x, double y);

/// G_I(x) = int_I g_I(x,y) m(dy), evaluated in closed form (the density is
/// piecewise constant, so each piece integrates exactly). Endpoint atoms are
/// rejected unless allow_endpoint_atoms is set; they would contribute zero
/// anyway but signal a misconfigured experiment.
double expected_exit_time(const SpeedMeasure& m, const Interval& I, double x,
                          bool allow_endpoint_atoms = false);

struct OccupationQuery {
    Interval interval;
    double start;  // x, must lie in interval
    std::function<double(double)> integrand;
};

/// int_I g_I(x,y) f(y) m(dy): adaptive quadrature (relative 1e-10) on the
/// density part plus exact atom terms.
double occupation_functional(const SpeedMeasure& m, const OccupationQuery& q,
                             bool allow_endpoint_atoms = false);

}  // namespace stickylab
