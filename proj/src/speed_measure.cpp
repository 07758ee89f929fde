#include "stickylab/speed_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stickylab {

Interval::Interval(double a_, double b_) : a(a_), b(b_) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("Interval requires finite a < b");
}

SpeedMeasure::SpeedMeasure(std::vector<double> breakpoints, std::vector<double> levels,
                           double default_level, std::vector<Atom> atoms)
    : breakpoints_(std::move(breakpoints)),
      levels_(std::move(levels)),
      default_level_(default_level),
      atoms_(std::move(atoms)) {
    if (!breakpoints_.empty() && levels_.size() + 1 != breakpoints_.size())
        throw std::invalid_argument("need one level per breakpoint gap");
    if (breakpoints_.empty() && !levels_.empty())
        throw std::invalid_argument("levels given without breakpoints");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i - 1] < breakpoints_[i]))
            throw std::invalid_argument("breakpoints must be strictly increasing");
    if (!(default_level_ > 0.0) || !std::isfinite(default_level_))
        throw std::invalid_argument("default density level must be positive and finite");
    for (double lv : levels_)
        if (!(lv > 0.0) || !std::isfinite(lv))
            throw std::invalid_argument("density levels must be positive and finite");
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& l, const Atom& r) { return l.location < r.location; });
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (!(atoms_[i].weight > 0.0) || !std::isfinite(atoms_[i].weight))
            throw std::invalid_argument("atom weights must be positive and finite");
        if (i > 0 && atoms_[i - 1].location == atoms_[i].location)
            throw std::invalid_argument("atom locations must be distinct");
    }
}

SpeedMeasure SpeedMeasure::lebesgue() { return SpeedMeasure({}, {}, 1.0, {}); }

SpeedMeasure SpeedMeasure::lebesgue_plus_atom(double gamma, double location) {
    return SpeedMeasure({}, {}, 1.0, {{location, gamma}});
}

SpeedMeasure SpeedMeasure::band_regularized(double eps, double gamma) {
    if (!(eps > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("band_regularized needs eps > 0, gamma > 0");
    return SpeedMeasure({-eps, eps}, {1.0 + gamma / eps}, 1.0, {});
}

double SpeedMeasure::density_at(double x) const {
    if (breakpoints_.empty() || x < breakpoints_.front() || x >= breakpoints_.back())
        return default_level_;
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return levels_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

namespace {

// Integral of the density over [lo, hi], walking the constant pieces.
double density_mass(const SpeedMeasure& m, double lo, double hi) {
    if (hi <= lo) return 0.0;
    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double b : m.breakpoints())
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        total += m.density_at(mid) * (cuts[i + 1] - cuts[i]);
    }
    return total;
}

}  // namespace

double SpeedMeasure::density_mass(double lo, double hi) const {
    return stickylab::density_mass(*this, lo, hi);
}

double SpeedMeasure::mass(const Interval& I, bool include_endpoints) const {
    double total = stickylab::density_mass(*this, I.a, I.b);
    for (const Atom& at : atoms_) {
        bool inside = include_endpoints ? (at.location >= I.a && at.location <= I.b)
                                        : (at.location > I.a && at.location < I.b);
        if (inside) total += at.weight;
    }
    return total;
}

bool SpeedMeasure::has_endpoint_atom(const Interval& I) const {
    for (const Atom& at : atoms_)
        if (at.location == I.a || at.location == I.b) return true;
    return false;
}

double green_kernel(const Interval& I, double x, double y) {
    if (!I.contains(x) || !I.contains(y))
        throw std::domain_error("green_kernel: point outside interval");
    double lo = std::min(x, y), hi = std::max(x, y);
    return 2.0 * (lo - I.a) * (I.b - hi) / I.length();
}

namespace {

void check_endpoint_atoms(const SpeedMeasure& m, const Interval& I, bool allow) {
    if (!allow && m.has_endpoint_atom(I))
        throw std::invalid_argument("interval endpoint carries an atom");
}

// Exact integral of g_I(x, .) against a constant density over [lo, hi].
// g is linear in y on either side of the kink at y = x.
double green_piece_integral(const Interval& I, double x, double lo, double hi) {
    if (hi <= lo) return 0.0;
    const double a = I.a, b = I.b, len = I.length();
    double total = 0.0;
    // y <= x part: g = 2 (y - a)(b - x)/len, antiderivative (y-a)^2 (b-x)/len
    double l1 = lo, h1 = std::min(hi, x);
    if (h1 > l1)
        total += ((h1 - a) * (h1 - a) - (l1 - a) * (l1 - a)) * (b - x) / len;
    // y >= x part: g = 2 (x - a)(b - y)/len, antiderivative -(b-y)^2 (x-a)/len
    double l2 = std::max(lo, x), h2 = hi;
    if (h2 > l2)
        total += ((b - l2) * (b - l2) - (b - h2) * (b - h2)) * (x - a) / len;
    return total;
}

}  // namespace

double expected_exit_time(const SpeedMeasure& m, const Interval& I, double x,
                          bool allow_endpoint_atoms) {
    if (!I.contains(x)) throw std::domain_error("expected_exit_time: x outside interval");
    check_endpoint_atoms(m, I, allow_endpoint_atoms);
    if (x == I.a || x == I.b) return 0.0;

    std::vector<double> cuts;
    cuts.push_back(I.a);
    for (double b : m.breakpoints())
        if (b > I.a && b < I.b) cuts.push_back(b);
    cuts.push_back(I.b);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        total += m.density_at(mid) * green_piece_integral(I, x, cuts[i], cuts[i + 1]);
    }
    for (const auto& at : m.atoms())
        if (at.location > I.a && at.location < I.b)
            total += at.weight * green_kernel(I, x, at.location);
    return total;
}

namespace {

// Globally adaptive Simpson rule: always split the panel with the largest
// error estimate until the summed estimate meets the budget. Unlike the
// classic tolerance-halving recursion this converges on integrands with
// jumps or point spikes (the panel around the defect simply shrinks until
// its contribution is negligible).
struct Quad {
    std::function<double(double)> f;
    double abs_tol;

    struct Panel {
        double a, b, fa, fm, fb;
        double value;  // Simpson estimate
        double err;    // |two-panel refinement - value|

        bool operator<(const Panel& o) const { return err < o.err; }
    };

    static double simpson(double a, double b, double fa, double fm, double fb) {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }

    Panel make(double a, double b, double fa, double fm, double fb) const {
        Panel p{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), 0.0};
        double m = 0.5 * (a + b);
        double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
        double refined = simpson(a, m, fa, flm, fm) + simpson(m, b, fm, frm, fb);
        p.err = std::abs(refined - p.value);
        return p;
    }

    double integrate(double a, double b) const {
        if (b <= a) return 0.0;
        // Start from a uniform partition: a single panel whose refinement
        // happens to agree with its own estimate (possible for integrands
        // with jumps placed symmetrically) would otherwise be accepted as
        // converged immediately.
        std::vector<Panel> heap;
        double err_sum = 0.0;
        const int initial = 16;
        for (int i = 0; i < initial; ++i) {
            double lo = a + (b - a) * i / initial;
            double hi = a + (b - a) * (i + 1) / initial;
            Panel p = make(lo, hi, f(lo), f(0.5 * (lo + hi)), f(hi));
            err_sum += p.err;
            heap.push_back(p);
        }
        std::make_heap(heap.begin(), heap.end());
        std::size_t splits = 0;
        while (err_sum > abs_tol) {
            if (++splits > 20000)
                throw QuadratureError("adaptive quadrature failed to converge");
            std::pop_heap(heap.begin(), heap.end());
            Panel worst = heap.back();
            heap.pop_back();
            err_sum -= worst.err;
            double mid = 0.5 * (worst.a + worst.b);
            Panel left = make(worst.a, mid, worst.fa, f(0.5 * (worst.a + mid)), worst.fm);
            Panel right = make(mid, worst.b, worst.fm, f(0.5 * (mid + worst.b)), worst.fb);
            err_sum += left.err + right.err;
            heap.push_back(left);
            std::push_heap(heap.begin(), heap.end());
            heap.push_back(right);
            std::push_heap(heap.begin(), heap.end());
        }
        double total = 0.0;
        for (const Panel& p : heap) total += p.value;
        return total;
    }
};

}  // namespace

double occupation_functional(const SpeedMeasure& m, const OccupationQuery& q,
                             bool allow_endpoint_atoms) {
    const Interval& I = q.interval;
    const double x = q.start;
    if (!I.contains(x)) throw std::domain_error("occupation_functional: start outside interval");
    check_endpoint_atoms(m, I, allow_endpoint_atoms);

    // Absolute tolerance derived from the relative 1e-10 target via the crude
    // bound |f| <= sup|f| estimated on a coarse grid; refined below if zero.
    double fscale = 0.0;
    for (int i = 0; i <= 32; ++i) {
        double y = I.a + I.length() * i / 32.0;
        fscale = std::max(fscale, std::abs(q.integrand(y)));
    }
    if (fscale == 0.0) fscale = 1.0;
    double gscale = I.length();  // sup g <= (b-a)/2 * 2
    double mass_scale = m.mass(I, true);
    double abs_tol = 1e-10 * fscale * gscale * std::max(mass_scale, 1.0);

    std::vector<double> cuts;
    cuts.push_back(I.a);
    for (double b : m.breakpoints())
        if (b > I.a && b < I.b) cuts.push_back(b);
    if (x > I.a && x < I.b) cuts.push_back(x);  // kink of g
    cuts.push_back(I.b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        double rho = m.density_at(mid);
        if (rho == 0.0) continue;
        Quad quad{[&](double y) { return green_kernel(I, x, y) * q.integrand(y); },
                  abs_tol / static_cast<double>(cuts.size())};
        total += rho * quad.integrate(cuts[i], cuts[i + 1]);
    }
    for (const auto& at : m.atoms())
        if (at.location > I.a && at.location < I.b)
            total += at.weight * green_kernel(I, x, at.location) * q.integrand(at.location);
    return total;
}

namespace {

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    return os.str();
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char c : s) {
        if (c == '[' || c == ']' || c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c)))
            continue;
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stod(cur));
    return out;
}

}  // namespace

std::string SpeedMeasure::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "density.breakpoints = [" << join(breakpoints_) << "]\n";
    os << "density.levels = [" << join(levels_) << "]\n";
    os << "density.default = " << default_level_ << "\n";
    os << "atoms = [";
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i) os << ", ";
        os << "(" << atoms_[i].location << ", " << atoms_[i].weight << ")";
    }
    os << "]\n";
    return os.str();
}

SpeedMeasure SpeedMeasure::from_text(const std::string& text) {
    std::vector<double> breakpoints, levels;
    double default_level = 1.0;
    std::vector<Atom> atoms;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
        if (key == "density.breakpoints") {
            breakpoints = parse_list(val);
        } else if (key == "density.levels") {
            levels = parse_list(val);
        } else if (key == "density.default") {
            default_level = std::stod(val);
        } else if (key == "atoms") {
            auto flat = parse_list(val);
            if (flat.size() % 2 != 0)
                throw std::invalid_argument("atoms list must be (loc, weight) pairs");
            for (std::size_t i = 0; i < flat.size(); i += 2)
                atoms.push_back({flat[i], flat[i + 1]});
        }
    }
    return SpeedMeasure(std::move(breakpoints), std::move(levels), default_level,
                        std::move(atoms));
}

}  // namespace stickylab
