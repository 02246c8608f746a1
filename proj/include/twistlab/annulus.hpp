#pragma once

// Twist condition, twist interval and sampled rotation sets of annulus lifts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "twistlab/circle.hpp"
#include "twistlab/cover.hpp"
#include "twistlab/parallel.hpp"

namespace twistlab {

struct TwistReport {
    std::size_t nx = 0;
    std::size_t ny = 0;
    // min over sampled x and adjacent y1 < y2 of x1(x,y2) - x1(x,y1).
    double min_increment = 0.0;
    Point argmin{};      // (x, y1) of the minimizing pair
    double argmin_y2 = 0.0;
    bool is_twist = false;
    // max observed |dx1/dy| over the same pairs.
    double lipschitz_hint = 0.0;
};

struct TwistInterval {
    RotationEstimate rho0;
    RotationEstimate rho1;
};

struct BoundaryTwist {
    // Certified rho0 < rho1; false means "undecided at this tolerance", never
    // "equal".
    bool certified = false;
    TwistInterval interval;
};

struct RotationSample {
    Point point{};
    double upper = 0.0;
    double lower = 0.0;
    // Error scale 1/k of the earliest checkpoint in the window.
    double halfwidth = 0.0;
    std::size_t n = 0;
    std::size_t window = 0;

    [[nodiscard]] double value() const { return 0.5 * (upper + lower); }
};

struct Histogram {
    double lo = 0.0;
    double bin_width = 0.0;
    std::vector<std::size_t> counts;
};

struct Containment {
    bool contained = false;
    // Largest violation below rho0 and above rho1 after inflation (<= 0 is fine).
    double max_below = 0.0;
    double max_above = 0.0;
    double slack = 0.0;
};

struct RotationSetEstimate {
    std::vector<RotationSample> samples;
    double hull_lo = 0.0;
    double hull_hi = 0.0;
    Histogram histogram;
    TwistInterval twist;
    Containment containment;

    [[nodiscard]] double hull_width() const { return hull_hi - hull_lo; }
};

struct RotationSetOptions {
    std::size_t n = 100'000;
    std::size_t window = 3;
    std::size_t bins = 64;
    double twist_tol = 1e-6;
    double slack = 1e-4;
    unsigned threads = 0;
};

inline TwistReport check_twist(const AnnulusLift &f, std::size_t nx, std::size_t ny, double tol, double y_lo = 0.0,
                               double y_hi = 1.0)
{
    if (nx < 2 || ny < 2) {
        throw std::invalid_argument("check_twist: grid must be at least 2x2");
    }
    TwistReport r;
    r.nx = nx;
    r.ny = ny;
    r.min_increment = std::numeric_limits<double>::infinity();
    const double dy = (y_hi - y_lo) / static_cast<double>(ny - 1);
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(nx);
        double y_prev = y_lo;
        double x1_prev = f(Point{x, y_prev}).x;
        for (std::size_t j = 1; j < ny; ++j) {
            const double y = (j + 1 == ny) ? y_hi : y_lo + static_cast<double>(j) * dy;
            const double x1 = f(Point{x, y}).x;
            const double inc = x1 - x1_prev;
            if (inc < r.min_increment) {
                r.min_increment = inc;
                r.argmin = Point{x, y_prev};
                r.argmin_y2 = y;
            }
            r.lipschitz_hint = std::max(r.lipschitz_hint, std::abs(inc) / (y - y_prev));
            y_prev = y;
            x1_prev = x1;
        }
    }
    r.is_twist = r.min_increment > tol;
    return r;
}

inline TwistInterval twist_interval(const AnnulusLift &f, double tol, const AdaptiveOptions &opt = {})
{
    return TwistInterval{rotation_number_adaptive(boundary_restriction(f, 0), tol, opt),
                         rotation_number_adaptive(boundary_restriction(f, 1), tol, opt)};
}

inline BoundaryTwist boundary_twist_condition(const AnnulusLift &f, double tol, const AdaptiveOptions &opt = {})
{
    BoundaryTwist out;
    out.interval = twist_interval(f, tol, opt);
    out.certified = out.interval.rho0.hi() < out.interval.rho1.lo();
    return out;
}

// Geometrically spaced checkpoints (ratio 1.5) ending at n.
inline std::vector<std::size_t> checkpoints(std::size_t n)
{
    std::vector<std::size_t> ks;
    std::size_t k = 1;
    while (k < n) {
        ks.push_back(k);
        k = std::max(k + 1, static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(k))));
    }
    ks.push_back(n);
    return ks;
}

inline RotationSample rotation_sample(const AnnulusLift &f, Point p, std::size_t n, std::size_t window)
{
    if (window < 1 || n < window) {
        throw std::invalid_argument("rotation_sample: need n >= window >= 1");
    }
    const auto ks = checkpoints(n);
    window = std::min(window, ks.size());
    const std::size_t first = ks.size() - window;

    RotationSample s;
    s.point = p;
    s.n = n;
    s.window = window;
    s.upper = -std::numeric_limits<double>::infinity();
    s.lower = std::numeric_limits<double>::infinity();
    s.halfwidth = 1.0 / static_cast<double>(ks[first]);

    const double fl0 = std::floor(p.x);
    const double frac0 = p.x - fl0;
    Point cur{frac0, p.y};
    double turns = 0.0;
    std::size_t k = 0;
    for (std::size_t c = 0; c < ks.size(); ++c) {
        while (k < ks[c]) {
            const Point q = f(cur);
            detail::check_y(f, q, cur);
            const double fl = std::floor(q.x);
            turns += fl;
            cur = Point{q.x - fl, q.y};
            ++k;
        }
        if (c >= first) {
            const double avg = (turns + cur.x - frac0) / static_cast<double>(k);
            s.upper = std::max(s.upper, avg);
            s.lower = std::min(s.lower, avg);
        }
    }
    return s;
}

// x = i/nx, y = j/(ny-1).
inline std::vector<Point> annulus_grid(std::size_t nx, std::size_t ny)
{
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("annulus_grid: empty grid");
    }
    std::vector<Point> pts;
    pts.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = (ny == 1) ? 0.5 : static_cast<double>(j) / static_cast<double>(ny - 1);
        for (std::size_t i = 0; i < nx; ++i) {
            pts.push_back(Point{static_cast<double>(i) / static_cast<double>(nx), y});
        }
    }
    return pts;
}

inline Containment check_containment(std::span<const RotationSample> samples, const TwistInterval &ti, double slack)
{
    Containment c;
    c.slack = slack;
    c.max_below = -std::numeric_limits<double>::infinity();
    c.max_above = -std::numeric_limits<double>::infinity();
    for (const auto &s : samples) {
        c.max_below = std::max(c.max_below, (ti.rho0.lo() - s.halfwidth - slack) - s.lower);
        c.max_above = std::max(c.max_above, s.upper - (ti.rho1.hi() + s.halfwidth + slack));
    }
    c.contained = c.max_below <= 0.0 && c.max_above <= 0.0;
    return c;
}

inline RotationSetEstimate rotation_set(const AnnulusLift &f, std::span<const Point> grid,
                                        const RotationSetOptions &opt = {})
{
    if (grid.empty()) {
        throw std::invalid_argument("rotation_set: empty grid");
    }
    RotationSetEstimate est;
    est.samples.resize(grid.size());
    parallel_for(grid.size(), opt.threads,
                 [&](std::size_t i) { est.samples[i] = rotation_sample(f, grid[i], opt.n, opt.window); });

    est.hull_lo = std::numeric_limits<double>::infinity();
    est.hull_hi = -std::numeric_limits<double>::infinity();
    for (const auto &s : est.samples) {
        est.hull_lo = std::min(est.hull_lo, s.lower);
        est.hull_hi = std::max(est.hull_hi, s.upper);
    }

    const std::size_t bins = std::max<std::size_t>(opt.bins, 1);
    est.histogram.lo = est.hull_lo;
    est.histogram.counts.assign(bins, 0);
    const double width = est.hull_hi - est.hull_lo;
    est.histogram.bin_width = width / static_cast<double>(bins);
    for (const auto &s : est.samples) {
        std::size_t b = 0;
        if (est.histogram.bin_width > 0.0) {
            b = static_cast<std::size_t>((s.value() - est.hull_lo) / est.histogram.bin_width);
            b = std::min(b, bins - 1);
        }
        ++est.histogram.counts[b];
    }

    est.twist = twist_interval(f, opt.twist_tol);
    est.containment = check_containment(est.samples, est.twist, opt.slack);
    return est;
}

inline RotationSetEstimate rotation_set(const AnnulusLift &f, std::size_t nx, std::size_t ny,
                                        const RotationSetOptions &opt = {})
{
    const auto grid = annulus_grid(nx, ny);
    return rotation_set(f, grid, opt);
}

} // namespace twistlab
