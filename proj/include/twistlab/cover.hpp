#pragma once

// Lifts of circle and annulus homeomorphisms to the universal cover.
//
// Every map in the library is handled through its lift: a circle map g is a
// strictly increasing g~ : R -> R with g~(x+1) = g~(x)+1, and an annulus map f
// on T x [0,1] is a map of the strip R x [0,1] commuting with (x,y) -> (x+1,y).
// Reduction mod 1 recovers the map itself.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/error.hpp"

namespace twistlab {

// Absolute equivariance tolerance for closed-form maps.
inline constexpr double default_eq_tol = 1e-12;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const Point &, const Point &) = default;
};

// A rotation number together with a rigorous enclosure:
// the true value lies in [value - halfwidth, value + halfwidth].
struct RotationEstimate {
    double value = 0.0;
    double halfwidth = 0.0;
    std::size_t iterations = 0;
    double seed = 0.0;

    [[nodiscard]] double lo() const { return value - halfwidth; }
    [[nodiscard]] double hi() const { return value + halfwidth; }
    [[nodiscard]] bool contains(double r) const { return lo() <= r && r <= hi(); }
    [[nodiscard]] bool overlaps(const RotationEstimate &o) const { return lo() <= o.hi() && o.lo() <= hi(); }
};

class CircleLift {
public:
    using Fn = std::function<double(double)>;

    CircleLift(Fn fn, std::string label, double eq_tol = default_eq_tol)
        : fn_(std::move(fn)), label_(std::move(label)), eq_tol_(eq_tol)
    {
        if (!fn_) {
            throw std::invalid_argument("CircleLift: empty evaluation function");
        }
    }

    double operator()(double x) const { return fn_(x); }

    [[nodiscard]] const std::string &label() const { return label_; }
    [[nodiscard]] double eq_tol() const { return eq_tol_; }

    // g~ + k, another lift of the same circle map when k is an integer.
    [[nodiscard]] CircleLift shifted(double k) const
    {
        return CircleLift([fn = fn_, k](double x) { return fn(x) + k; }, label_ + "+shift", eq_tol_);
    }

private:
    Fn fn_;
    std::string label_;
    double eq_tol_;
};

class AnnulusLift {
public:
    using Fn = std::function<Point(Point)>;

    AnnulusLift(Fn fn, std::string label, double eq_tol = default_eq_tol)
        : fn_(std::move(fn)), label_(std::move(label)), eq_tol_(eq_tol)
    {
        if (!fn_) {
            throw std::invalid_argument("AnnulusLift: empty evaluation function");
        }
    }

    Point operator()(Point p) const { return fn_(p); }

    [[nodiscard]] const std::string &label() const { return label_; }
    [[nodiscard]] double eq_tol() const { return eq_tol_; }

    // Composition with the integer translation T_k.
    [[nodiscard]] AnnulusLift translated(double k) const
    {
        if (k == 0.0) {
            return *this;
        }
        return AnnulusLift(
            [fn = fn_, k](Point p) {
                auto q = fn(p);
                q.x += k;
                return q;
            },
            label_, eq_tol_);
    }

private:
    Fn fn_;
    std::string label_;
    double eq_tol_;
};

struct OrbitSegment {
    std::vector<Point> points;

    [[nodiscard]] Point origin() const { return points.front(); }
    // Number of map applications; points.size() == length() + 1.
    [[nodiscard]] std::size_t length() const { return points.empty() ? 0 : points.size() - 1; }
};

namespace detail {

inline void check_y(const AnnulusLift &f, Point q, Point from)
{
    const double slack = f.eq_tol();
    if (!(q.y >= -slack && q.y <= 1.0 + slack)) {
        throw DomainEscape(f.label() + ": image y=" + std::to_string(q.y) + " of (" + std::to_string(from.x) + ", "
                           + std::to_string(from.y) + ") leaves [0,1]");
    }
}

} // namespace detail

// f_i as a circle lift: x -> first coordinate of F(x, i).
inline CircleLift boundary_restriction(const AnnulusLift &f, int i)
{
    if (i != 0 && i != 1) {
        throw std::invalid_argument("boundary_restriction: boundary index must be 0 or 1");
    }
    const double y = static_cast<double>(i);
    return CircleLift([f, y](double x) { return f(Point{x, y}).x; }, f.label() + "|y=" + std::to_string(i),
                      f.eq_tol());
}

inline OrbitSegment iterate(const AnnulusLift &f, Point p0, std::size_t n)
{
    if (n < 1) {
        throw std::invalid_argument("iterate: n must be >= 1");
    }
    if (!(p0.y >= 0.0 && p0.y <= 1.0)) {
        throw std::invalid_argument("iterate: starting y outside [0,1]");
    }
    OrbitSegment seg;
    seg.points.reserve(n + 1);
    seg.points.push_back(p0);
    Point p = p0;
    for (std::size_t k = 0; k < n; ++k) {
        const Point q = f(p);
        detail::check_y(f, q, p);
        seg.points.push_back(q);
        p = q;
    }
    return seg;
}

// Plain forward orbit of a circle lift, x_0 .. x_n.
inline std::vector<double> iterate(const CircleLift &g, double x0, std::size_t n)
{
    std::vector<double> xs;
    xs.reserve(n + 1);
    xs.push_back(x0);
    double x = x0;
    for (std::size_t k = 0; k < n; ++k) {
        x = g(x);
        xs.push_back(x);
    }
    return xs;
}

struct EquivarianceReport {
    double max_equivariance_residual = 0.0;
    double max_boundary_residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

inline EquivarianceReport check_equivariance(const AnnulusLift &f, std::span<const Point> samples, double tol)
{
    if (samples.empty()) {
        throw std::invalid_argument("check_equivariance: no samples");
    }
    EquivarianceReport r;
    r.tol = tol;
    for (const auto &p : samples) {
        const Point a = f(p);
        const Point b = f(Point{p.x + 1.0, p.y});
        const double res = std::max(std::abs(b.x - a.x - 1.0), std::abs(b.y - a.y));
        r.max_equivariance_residual = std::max(r.max_equivariance_residual, res);

        const double y0 = f(Point{p.x, 0.0}).y;
        const double y1 = f(Point{p.x, 1.0}).y;
        r.max_boundary_residual = std::max({r.max_boundary_residual, std::abs(y0), std::abs(y1 - 1.0)});
    }
    r.pass = r.max_equivariance_residual <= tol && r.max_boundary_residual <= tol;
    return r;
}

struct MonotonicityReport {
    // Smallest g(x_{i+1}) - g(x_i) over the sample pairs; must be > 0.
    double min_step = 0.0;
    double max_equivariance_residual = 0.0;
    bool pass = false;
};

// Sampled check on [x0, x0+1]. Cannot certify a homeomorphism globally; it only
// detects violations at the sampled pairs.
inline MonotonicityReport check_monotone(const CircleLift &g, std::size_t samples = 256, double x0 = 0.0)
{
    MonotonicityReport r;
    r.min_step = std::numeric_limits<double>::infinity();
    double prev = g(x0);
    for (std::size_t i = 1; i <= samples; ++i) {
        const double x = x0 + static_cast<double>(i) / static_cast<double>(samples);
        const double gx = g(x);
        r.min_step = std::min(r.min_step, gx - prev);
        prev = gx;
    }
    r.max_equivariance_residual = std::abs(prev - g(x0) - 1.0);
    r.pass = r.min_step > 0.0 && r.max_equivariance_residual <= g.eq_tol() * 16.0 + 1e-15;
    return r;
}

// Deterministic sample set covering the fundamental domain, boundaries included.
inline std::vector<Point> validation_samples(std::size_t nx = 16, std::size_t ny = 9)
{
    std::vector<Point> pts;
    pts.reserve(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            pts.push_back(Point{(static_cast<double>(i) + 0.37) / static_cast<double>(nx),
                                static_cast<double>(j) / static_cast<double>(ny - 1)});
        }
    }
    return pts;
}

// Registration-time validation: equivariance, boundary preservation and sampled
// monotonicity of both boundary restrictions. Throws InvalidFamily.
inline void validate(const AnnulusLift &f)
{
    const auto pts = validation_samples();
    const auto rep = check_equivariance(f, pts, f.eq_tol());
    if (!rep.pass) {
        throw InvalidFamily(f.label() + ": equivariance residual " + std::to_string(rep.max_equivariance_residual)
                            + ", boundary residual " + std::to_string(rep.max_boundary_residual));
    }
    for (int i = 0; i < 2; ++i) {
        if (!check_monotone(boundary_restriction(f, i)).pass) {
            throw InvalidFamily(f.label() + ": boundary restriction " + std::to_string(i) + " is not monotone");
        }
    }
}

inline void validate(const CircleLift &g)
{
    if (!check_monotone(g).pass) {
        throw InvalidFamily(g.label() + ": lift is not strictly increasing / degree one at sampled points");
    }
}

// True when g~ - k has a sampled fixed point, which forces rho(g~) = k exactly.
inline bool has_integer_fixed_point(const CircleLift &g, double k, std::size_t grid = 256)
{
    double prev = g(0.0) - k;
    if (std::abs(prev) <= g.eq_tol()) {
        return true;
    }
    for (std::size_t i = 1; i <= grid; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(grid);
        const double h = g(x) - x - k;
        if (std::abs(h) <= g.eq_tol() || (h > 0.0) != (prev > 0.0)) {
            return true;
        }
        prev = h;
    }
    return false;
}

using RotationOracle = std::function<RotationEstimate(const CircleLift &)>;

// Picks the lift with rho(f~_0) in [0,1).
inline AnnulusLift normalize_lift(const AnnulusLift &f, const RotationOracle &oracle)
{
    const CircleLift f0 = boundary_restriction(f, 0);
    const RotationEstimate est = oracle(f0);
    if (!(est.halfwidth < 0.5)) {
        throw AmbiguousNormalization(f.label() + ": rotation estimate too coarse to fix the integer shift");
    }
    const double k_lo = std::ceil(est.lo());
    double shift = 0.0;
    if (k_lo <= est.hi()) {
        if (!has_integer_fixed_point(f0, k_lo)) {
            throw AmbiguousNormalization(f.label() + ": rho(f~0) interval [" + std::to_string(est.lo()) + ", "
                                         + std::to_string(est.hi()) + "] contains an integer");
        }
        shift = -k_lo;
    }
    else {
        shift = -std::floor(est.value);
    }
    return f.translated(shift);
}

} // namespace twistlab
