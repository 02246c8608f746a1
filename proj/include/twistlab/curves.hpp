#pragma once

// Invariant-curve candidates from orbit closures, Lipschitz-graph checks,
// rotation numbers of invariant graphs and recurrence scanning.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "twistlab/annulus.hpp"
#include "twistlab/circle.hpp"
#include "twistlab/cover.hpp"
#include "twistlab/error.hpp"
#include "twistlab/parallel.hpp"

namespace twistlab {

struct CurveCandidate {
    // (x mod 1, y), sorted by x; exact duplicates merged.
    std::vector<Point> points;
    std::string source;
    // Largest x-gap between consecutive points, wrap-around included.
    double gap_max = 1.0;
};

struct GraphReport {
    bool is_graph = false;
    bool single_valued = false;
    double lipschitz_estimate = 0.0;
    double lipschitz_bound_used = 0.0;
    double invariance_residual = 0.0;
    // Largest y-diameter inside one x-bin, and the bin width used.
    double max_bin_diameter = 0.0;
    double bin_width = 0.0;
};

enum class Distinctness { distinct, undecided };

inline std::string to_string(Distinctness d) { return d == Distinctness::distinct ? "distinct" : "undecided"; }

struct DistinctReport {
    Distinctness verdict = Distinctness::undecided;
    RotationEstimate rho1;
    RotationEstimate rho2;
    double min_separation = 0.0;
};

struct RecurrenceMap {
    std::vector<Point> grid;
    std::vector<std::uint8_t> returned;
    // First k in [1, N] with the iterate within eps of the start; 0 if none.
    std::vector<std::size_t> first_return;
    std::size_t max_iterations = 0;
    double eps = 0.0;

    [[nodiscard]] std::size_t count() const
    {
        return static_cast<std::size_t>(std::count(returned.begin(), returned.end(), std::uint8_t{1}));
    }
};

inline constexpr double max_graph_gap = 0.05;
inline constexpr double disjoint_threshold = 1e-6;

inline double wrap01(double x) { return x - std::floor(x); }

inline CurveCandidate make_curve(std::vector<Point> pts, std::string source)
{
    if (pts.empty()) {
        throw std::invalid_argument("make_curve: no points");
    }
    for (auto &p : pts) {
        p.x = wrap01(p.x);
    }
    std::sort(pts.begin(), pts.end(), [](const Point &a, const Point &b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    std::vector<Point> merged;
    merged.reserve(pts.size());
    for (const auto &p : pts) {
        if (!merged.empty() && std::abs(p.x - merged.back().x) <= 1e-12 && std::abs(p.y - merged.back().y) <= 1e-12) {
            continue;
        }
        merged.push_back(p);
    }
    CurveCandidate c;
    c.points = std::move(merged);
    c.source = std::move(source);
    c.gap_max = c.points.front().x + 1.0 - c.points.back().x;
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        c.gap_max = std::max(c.gap_max, c.points[i].x - c.points[i - 1].x);
    }
    return c;
}

// Horizontal circle y = const sampled at m points.
inline CurveCandidate horizontal_curve(double y, std::size_t m = 1024)
{
    std::vector<Point> pts;
    pts.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        pts.push_back(Point{static_cast<double>(i) / static_cast<double>(m), y});
    }
    return make_curve(std::move(pts), "horizontal y=" + std::to_string(y));
}

// Periodic piecewise-linear interpolation of the candidate at x.
inline double curve_height(const CurveCandidate &c, double x)
{
    const auto &pts = c.points;
    x = wrap01(x);
    auto it = std::upper_bound(pts.begin(), pts.end(), x, [](double v, const Point &p) { return v < p.x; });
    Point left;
    Point right;
    if (it == pts.begin()) {
        left = pts.back();
        left.x -= 1.0;
        right = pts.front();
    }
    else if (it == pts.end()) {
        left = pts.back();
        right = pts.front();
        right.x += 1.0;
    }
    else {
        right = *it;
        left = *(it - 1);
    }
    const double span = right.x - left.x;
    if (span <= 0.0) {
        return left.y;
    }
    const double w = (x - left.x) / span;
    return left.y + w * (right.y - left.y);
}

inline CurveCandidate trace_curve(const AnnulusLift &f, Point seed, std::size_t n)
{
    if (n < 100) {
        throw std::invalid_argument("trace_curve: n must be >= 100");
    }
    const auto orbit = iterate(f, seed, n);
    return make_curve(orbit.points, f.label() + " orbit of (" + std::to_string(seed.x) + ", "
                                        + std::to_string(seed.y) + "), n=" + std::to_string(n));
}

// Union of the orbit closures of several seeds; needed when single orbits are
// periodic (rational rotation on the curve).
inline CurveCandidate trace_curve(const AnnulusLift &f, std::span<const Point> seeds, std::size_t n)
{
    if (n < 100 || seeds.empty()) {
        throw std::invalid_argument("trace_curve: need n >= 100 and at least one seed");
    }
    std::vector<Point> pts;
    pts.reserve(seeds.size() * (n + 1));
    for (const auto &s : seeds) {
        const auto orbit = iterate(f, s, n);
        pts.insert(pts.end(), orbit.points.begin(), orbit.points.end());
    }
    return make_curve(std::move(pts), f.label() + " orbits of " + std::to_string(seeds.size()) + " seeds, n="
                                          + std::to_string(n));
}

// Working value of the Birkhoff bound: observed |dx1/dy| times a safety factor.
inline double working_lipschitz_bound(const TwistReport &tr, double factor = 4.0) { return factor * tr.lipschitz_hint; }

inline GraphReport birkhoff_graph_check(const AnnulusLift &f, const CurveCandidate &c, double lipschitz_bound,
                                        double tol)
{
    if (c.points.size() < 2 || c.gap_max > max_graph_gap) {
        throw InsufficientDensity("curve '" + c.source + "' has gap_max " + std::to_string(c.gap_max) + " > "
                                  + std::to_string(max_graph_gap));
    }
    GraphReport r;
    r.lipschitz_bound_used = lipschitz_bound;

    const auto &pts = c.points;
    const std::size_t m = pts.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Point a = pts[i];
        Point b = pts[(i + 1) % m];
        if (i + 1 == m) {
            b.x += 1.0;
        }
        const double dx = b.x - a.x;
        const double dy = std::abs(b.y - a.y);
        const double slope = (dx > 1e-12) ? dy / dx : (dy > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0);
        r.lipschitz_estimate = std::max(r.lipschitz_estimate, slope);
    }

    // Single-valuedness at bin scale: a Lipschitz graph spreads at most
    // (L + tol) * width over one bin.
    const auto nb = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.5 / c.gap_max)));
    r.bin_width = 1.0 / static_cast<double>(nb);
    std::vector<double> lo(nb, std::numeric_limits<double>::infinity());
    std::vector<double> hi(nb, -std::numeric_limits<double>::infinity());
    for (const auto &p : pts) {
        const auto b = std::min(nb - 1, static_cast<std::size_t>(p.x * static_cast<double>(nb)));
        lo[b] = std::min(lo[b], p.y);
        hi[b] = std::max(hi[b], p.y);
    }
    for (std::size_t b = 0; b < nb; ++b) {
        if (hi[b] >= lo[b]) {
            r.max_bin_diameter = std::max(r.max_bin_diameter, hi[b] - lo[b]);
        }
    }
    r.single_valued = r.max_bin_diameter <= (lipschitz_bound + tol) * r.bin_width + tol;

    // Image points against the interpolated curve, on at most 4096 points.
    const std::size_t stride = std::max<std::size_t>(1, m / 4096);
    for (std::size_t i = 0; i < m; i += stride) {
        const Point q = f(pts[i]);
        r.invariance_residual = std::max(r.invariance_residual, std::abs(q.y - curve_height(c, q.x)));
    }

    r.is_graph = r.single_valued && r.lipschitz_estimate <= lipschitz_bound + tol;
    return r;
}

// Circle map induced on an invariant graph: x -> first coordinate of F(x, c(x)).
inline CircleLift induced_circle_map(const AnnulusLift &f, const CurveCandidate &c)
{
    return CircleLift(
        [f, c](double x) {
            const double fl = std::floor(x);
            const double u = x - fl;
            return fl + f(Point{u, curve_height(c, u)}).x;
        },
        f.label() + " on " + c.source, std::max(f.eq_tol(), default_eq_tol));
}

inline RotationEstimate curve_rotation_number(const AnnulusLift &f, const CurveCandidate &c, double tol,
                                              double invariance_tol = 1e-6)
{
    double residual = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, c.points.size() / 4096);
    for (std::size_t i = 0; i < c.points.size(); i += stride) {
        const Point q = f(c.points[i]);
        residual = std::max(residual, std::abs(q.y - curve_height(c, q.x)));
    }
    if (residual > invariance_tol) {
        throw NotInvariant("curve '" + c.source + "' invariance residual " + std::to_string(residual) + " > "
                           + std::to_string(invariance_tol));
    }
    return rotation_number_adaptive(induced_circle_map(f, c), tol);
}

// Minimum vertical separation over the union of both x-grids.
inline double min_vertical_separation(const CurveCandidate &c1, const CurveCandidate &c2)
{
    double sep = std::numeric_limits<double>::infinity();
    for (const auto *c : {&c1, &c2}) {
        for (const auto &p : c->points) {
            sep = std::min(sep, std::abs(curve_height(c1, p.x) - curve_height(c2, p.x)));
        }
    }
    return sep;
}

inline DistinctReport distinct_rotation_check(const AnnulusLift &f, const CurveCandidate &c1,
                                              const CurveCandidate &c2, double tol, double invariance_tol = 1e-6)
{
    DistinctReport r;
    r.min_separation = min_vertical_separation(c1, c2);
    if (!(r.min_separation > disjoint_threshold)) {
        throw NotDisjoint("curves '" + c1.source + "' and '" + c2.source + "' are within "
                          + std::to_string(disjoint_threshold));
    }
    r.rho1 = curve_rotation_number(f, c1, tol, invariance_tol);
    r.rho2 = curve_rotation_number(f, c2, tol, invariance_tol);
    r.verdict = r.rho1.overlaps(r.rho2) ? Distinctness::undecided : Distinctness::distinct;
    return r;
}

// Annulus distance with x measured mod 1.
inline double annulus_distance(Point a, Point b)
{
    double dx = std::abs(wrap01(a.x) - wrap01(b.x));
    dx = std::min(dx, 1.0 - dx);
    return std::hypot(dx, a.y - b.y);
}

// Heuristic witness for non-wandering behaviour; never a certificate.
inline RecurrenceMap recurrence_scan(const AnnulusLift &f, std::span<const Point> grid, std::size_t max_iterations,
                                     double eps, unsigned threads = 0)
{
    if (max_iterations < 1 || !(eps > 0.0)) {
        throw std::invalid_argument("recurrence_scan: need N >= 1 and eps > 0");
    }
    RecurrenceMap r;
    r.grid.assign(grid.begin(), grid.end());
    r.returned.assign(grid.size(), 0);
    r.first_return.assign(grid.size(), 0);
    r.max_iterations = max_iterations;
    r.eps = eps;
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const Point start = grid[i];
        Point cur{wrap01(start.x), start.y};
        for (std::size_t k = 1; k <= max_iterations; ++k) {
            Point q = f(cur);
            detail::check_y(f, q, cur);
            q.x = wrap01(q.x);
            if (annulus_distance(q, start) < eps) {
                r.returned[i] = 1;
                r.first_return[i] = k;
                return;
            }
            cur = q;
        }
    });
    return r;
}

} // namespace twistlab
