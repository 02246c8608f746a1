#pragma once

// Rotation numbers of circle homeomorphisms.
//
// Estimates are rigorous enclosures built on the displacement bound
// |g~^n(x) - x - n*rho| < 1, valid for any degree-one increasing lift. Each
// evaluation may carry an absolute error of eq_tol, so the displacement after n
// steps is known to within 1 + n*eq_tol.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "twistlab/cover.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

struct LockingInterval {
    std::int64_t p = 0;
    std::int64_t q = 1;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double tol = 0.0;

    [[nodiscard]] double width() const { return t_hi - t_lo; }
};

struct RationalLock {
    std::int64_t p = 0;
    std::int64_t q = 1;
    // A point with |g~^q(x) - x - p| <= residual.
    double x = 0.0;
    double residual = 0.0;
};

struct AdaptiveOptions {
    std::size_t max_iterations = 100'000'000;
    double seed = 0.0;
};

struct DetectOptions {
    // Sign-change grid has grid_factor * q nodes per fundamental domain.
    std::size_t grid_factor = 64;
    // Iterations of the coarse estimate that limits the candidate numerators.
    std::size_t coarse_iterations = 4096;
};

using CircleFamily = std::function<CircleLift(double)>;

namespace detail {

// Orbit stepping that keeps the fractional part in [0,1) and accumulates the
// integer part separately; relies on g~(x+k) = g~(x)+k.
class CircleStepper {
public:
    CircleStepper(const CircleLift &g, double x0) : g_(g)
    {
        const double fl = std::floor(x0);
        frac_ = x0 - fl;
        frac0_ = frac_;
    }

    void step()
    {
        const double y = g_(frac_);
        const double fl = std::floor(y);
        turns_ += fl;
        frac_ = y - fl;
    }

    // g~^n(x0) - x0 for the steps taken so far.
    [[nodiscard]] double displacement() const { return turns_ + (frac_ - frac0_); }

private:
    const CircleLift &g_;
    double frac_ = 0.0;
    double frac0_ = 0.0;
    double turns_ = 0.0;
};

inline void require_monotone(const CircleLift &g, double x0)
{
    const auto rep = check_monotone(g, 256, x0);
    if (!rep.pass) {
        throw NonMonotoneDetected(g.label() + ": min sampled step " + std::to_string(rep.min_step)
                                  + ", equivariance residual " + std::to_string(rep.max_equivariance_residual));
    }
}

inline double iterate_q(const CircleLift &g, double x, std::int64_t q)
{
    for (std::int64_t k = 0; k < q; ++k) {
        x = g(x);
    }
    return x;
}

// Golden-section search for the maximum of h on [a, b].
template <class H>
double golden_max(const H &h, double a, double b, double &arg, int iters = 80)
{
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double hc = h(c);
    double hd = h(d);
    for (int i = 0; i < iters && (b - a) > 1e-15; ++i) {
        if (hc > hd) {
            b = d;
            d = c;
            hd = hc;
            c = b - inv_phi * (b - a);
            hc = h(c);
        }
        else {
            a = c;
            c = d;
            hc = hd;
            d = a + inv_phi * (b - a);
            hd = h(d);
        }
    }
    if (hc > hd) {
        arg = c;
        return hc;
    }
    arg = d;
    return hd;
}

struct Extrema {
    double min = 0.0;
    double max = 0.0;
    double argmin = 0.0;
    double argmax = 0.0;
};

// Min and max over one period of h(x) = g~^q(x) - x - p: grid scan followed by
// golden-section refinement around the best grid nodes.
inline Extrema periodic_extrema(const CircleLift &g, std::int64_t p, std::int64_t q, std::size_t grid_factor)
{
    const auto h = [&](double x) { return iterate_q(g, x, q) - x - static_cast<double>(p); };
    const std::size_t m = grid_factor * static_cast<std::size_t>(q);
    const double dx = 1.0 / static_cast<double>(m);
    Extrema e;
    std::size_t imin = 0;
    std::size_t imax = 0;
    e.min = e.max = h(0.0);
    for (std::size_t i = 1; i < m; ++i) {
        const double v = h(static_cast<double>(i) * dx);
        if (v < e.min) {
            e.min = v;
            imin = i;
        }
        if (v > e.max) {
            e.max = v;
            imax = i;
        }
    }
    const double cmax = static_cast<double>(imax) * dx;
    const double cmin = static_cast<double>(imin) * dx;
    double arg = cmax;
    const double rmax = golden_max(h, cmax - dx, cmax + dx, arg);
    e.argmax = cmax;
    if (rmax > e.max) {
        e.max = rmax;
        e.argmax = arg;
    }
    const auto neg = [&](double x) { return -h(x); };
    const double rmin = -golden_max(neg, cmin - dx, cmin + dx, arg);
    e.argmin = cmin;
    if (rmin < e.min) {
        e.min = rmin;
        e.argmin = arg;
    }
    return e;
}

// Locates x with |h(x)| <= tol for h = g~^q - id - p, if the grid sees a sign
// change or a near-tangent extremum touching zero.
inline std::optional<RationalLock> find_periodic_point(const CircleLift &g, std::int64_t p, std::int64_t q,
                                                       double tol, std::size_t grid_factor)
{
    const auto h = [&](double x) { return iterate_q(g, x, q) - x - static_cast<double>(p); };
    const std::size_t m = grid_factor * static_cast<std::size_t>(q);
    const double dx = 1.0 / static_cast<double>(m);

    double x_prev = 0.0;
    double h_prev = h(0.0);
    if (std::abs(h_prev) <= tol) {
        return RationalLock{p, q, 0.0, std::abs(h_prev)};
    }
    for (std::size_t i = 1; i <= m; ++i) {
        const double x = static_cast<double>(i) * dx;
        const double hx = h(x);
        if (std::abs(hx) <= tol) {
            return RationalLock{p, q, x, std::abs(hx)};
        }
        if ((hx > 0.0) != (h_prev > 0.0)) {
            double a = x_prev;
            double b = x;
            double ha = h_prev;
            double mid = 0.5 * (a + b);
            double hm = h(mid);
            while (std::abs(hm) > tol && (b - a) > 4e-16) {
                if ((hm > 0.0) == (ha > 0.0)) {
                    a = mid;
                    ha = hm;
                }
                else {
                    b = mid;
                }
                mid = 0.5 * (a + b);
                hm = h(mid);
            }
            return RationalLock{p, q, mid, std::abs(hm)};
        }
        x_prev = x;
        h_prev = hx;
    }
    // No sign change on the grid: the graph may still touch the diagonal
    // between nodes.
    const Extrema e = periodic_extrema(g, p, q, grid_factor);
    if (e.max >= -tol && e.min <= tol) {
        const double x = (std::abs(e.max) < std::abs(e.min)) ? e.argmax : e.argmin;
        return RationalLock{p, q, x, std::min(std::abs(e.max), std::abs(e.min))};
    }
    return std::nullopt;
}

} // namespace detail

inline RotationEstimate rotation_number(const CircleLift &g, double x0, std::size_t n)
{
    if (n < 1) {
        throw std::invalid_argument("rotation_number: n must be >= 1");
    }
    detail::require_monotone(g, x0);
    detail::CircleStepper it(g, x0);
    for (std::size_t k = 0; k < n; ++k) {
        it.step();
    }
    const double nd = static_cast<double>(n);
    return RotationEstimate{it.displacement() / nd, (1.0 + nd * g.eq_tol()) / nd, n, x0};
}

// Doubling schedule n = 1, 2, 4, ... along one orbit. Every checkpoint gives the
// enclosure [(a_n - s_n)/n, (a_n + s_n)/n] with s_n = 1 + n*eq_tol; the running
// intersection of all of them is reported.
inline RotationEstimate rotation_number_adaptive(const CircleLift &g, double tol, const AdaptiveOptions &opt = {})
{
    if (!(tol > 0.0)) {
        throw std::invalid_argument("rotation_number_adaptive: tol must be > 0");
    }
    detail::require_monotone(g, opt.seed);
    detail::CircleStepper it(g, opt.seed);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    std::size_t next = 1;
    while (true) {
        if (next > opt.max_iterations) {
            throw BudgetExceeded(g.label() + ": tolerance " + std::to_string(tol) + " not reached within "
                                 + std::to_string(opt.max_iterations) + " iterations");
        }
        while (n < next) {
            it.step();
            ++n;
        }
        const double nd = static_cast<double>(n);
        const double slack = 1.0 + nd * g.eq_tol();
        const double a = it.displacement();
        const double new_lo = std::max(lo, (a - slack) / nd);
        const double new_hi = std::min(hi, (a + slack) / nd);
        if (new_lo <= new_hi) {
            lo = new_lo;
            hi = new_hi;
        }
        else {
            lo = (a - slack) / nd;
            hi = (a + slack) / nd;
        }
        const double hw = 0.5 * (hi - lo);
        if (hw <= tol) {
            return RotationEstimate{0.5 * (lo + hi), hw, n, opt.seed};
        }
        next = 2 * n;
    }
}

inline std::optional<RationalLock> detect_rational(const CircleLift &g, std::int64_t q_max, double tol,
                                                   const DetectOptions &opt = {})
{
    if (q_max < 1 || !(tol > 0.0)) {
        throw std::invalid_argument("detect_rational: need q_max >= 1 and tol > 0");
    }
    const RotationEstimate coarse = rotation_number(g, 0.0, opt.coarse_iterations);
    for (std::int64_t q = 1; q <= q_max; ++q) {
        const double qd = static_cast<double>(q);
        const auto p_lo = static_cast<std::int64_t>(std::ceil(qd * coarse.lo() - 1e-9));
        const auto p_hi = static_cast<std::int64_t>(std::floor(qd * coarse.hi() + 1e-9));
        for (std::int64_t p = p_lo; p <= p_hi; ++p) {
            if (std::gcd(p, q) != 1) {
                continue;
            }
            if (auto hit = detail::find_periodic_point(g, p, q, tol, opt.grid_factor)) {
                return hit;
            }
        }
    }
    return std::nullopt;
}

// True iff g~^q - id - p has a zero, i.e. rho(g~) = p/q (sampled + refined).
inline bool is_locked(const CircleLift &g, std::int64_t p, std::int64_t q, std::size_t grid_factor = 64)
{
    const auto e = detail::periodic_extrema(g, p, q, grid_factor);
    return e.min <= 0.0 && e.max >= 0.0;
}

// Parameter interval on which rho(family(t)) = p/q, for a family increasing in t.
// rho(t) < p/q iff max_x (g_t^q(x) - x - p) < 0, and rho(t) > p/q iff the min
// is > 0, so both endpoints are found by bisection on those predicates.
inline LockingInterval locking_interval(const CircleFamily &family, std::int64_t p, std::int64_t q, double t_lo,
                                        double t_hi, double tol, std::size_t grid_factor = 64)
{
    if (q < 1 || !(tol > 0.0) || !(t_lo <= t_hi)) {
        throw std::invalid_argument("locking_interval: need q >= 1, tol > 0, t_lo <= t_hi");
    }
    const std::int64_t d = std::gcd(p, q);
    p /= d;
    q /= d;

    const CircleLift g_lo = family(t_lo);
    const CircleLift g_hi = family(t_hi);
    for (double x : {0.0, 0.25, 0.5, 0.75}) {
        if (g_lo(x) > g_hi(x)) {
            throw InvalidFamily("locking_interval: family is not increasing in t at x=" + std::to_string(x));
        }
    }
    const auto ext = [&](double t) { return detail::periodic_extrema(family(t), p, q, grid_factor); };
    const auto e_lo = ext(t_lo);
    const auto e_hi = ext(t_hi);
    const std::string tag = std::to_string(p) + "/" + std::to_string(q);
    if (e_lo.min > 0.0) {
        throw TongueMissed("rotation number already exceeds " + tag + " at t=" + std::to_string(t_lo));
    }
    if (e_hi.max < 0.0) {
        throw TongueMissed("rotation number stays below " + tag + " up to t=" + std::to_string(t_hi));
    }

    LockingInterval out{p, q, t_lo, t_hi, tol};
    if (e_lo.max < 0.0) {
        double a = t_lo;
        double b = t_hi;
        while (b - a > tol) {
            const double m = 0.5 * (a + b);
            (ext(m).max < 0.0 ? a : b) = m;
        }
        out.t_lo = b;
    }
    if (e_hi.min > 0.0) {
        double a = t_lo;
        double b = t_hi;
        while (b - a > tol) {
            const double m = 0.5 * (a + b);
            (ext(m).min > 0.0 ? b : a) = m;
        }
        out.t_hi = a;
    }
    if (out.t_lo > out.t_hi) {
        if (out.t_lo - out.t_hi > 2.0 * tol) {
            throw TongueMissed("no parameter with rotation number " + tag + " in range");
        }
        const double mid = 0.5 * (out.t_lo + out.t_hi);
        out.t_lo = out.t_hi = mid;
    }
    return out;
}

} // namespace twistlab
