#pragma once

// Billiard map inside the ellipse x^2/a^2 + y^2/b^2 = 1 in arclength-angle
// coordinates (s, theta): s is the arclength from the vertex (a, 0) measured
// counterclockwise, theta in [0, pi] is the angle from the unit tangent to the
// outgoing velocity.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "twistlab/cover.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct BilliardState {
    double x = 0.0;     // arclength in [0, perimeter)
    double theta = 0.0; // angle in [0, pi]
};

inline constexpr double grazing_margin = 1e-9;

// Equivariance tolerance of the billiard lift (arclength inversion is iterative).
inline constexpr double billiard_eq_tol = 1e-8;

class Ellipse {
public:
    static constexpr std::size_t default_nodes = 4096;

    Ellipse(double a, double b, std::size_t nodes = default_nodes) : a_(a), b_(b)
    {
        // a == b is accepted: the circle is the limiting table.
        if (!(b > 0.0) || !(a >= b) || !std::isfinite(a) || nodes < 16) {
            throw std::invalid_argument("Ellipse: need a >= b > 0");
        }
        dt_ = 2.0 * std::numbers::pi / static_cast<double>(nodes);
        s_.resize(nodes + 1);
        s_[0] = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            const double t0 = static_cast<double>(i) * dt_;
            s_[i + 1] = s_[i] + integrate_speed(t0, t0 + dt_);
        }
        perimeter_ = s_.back();
    }

    [[nodiscard]] double a() const { return a_; }
    [[nodiscard]] double b() const { return b_; }
    [[nodiscard]] double perimeter() const { return perimeter_; }
    [[nodiscard]] std::size_t nodes() const { return s_.size() - 1; }
    // Arclength at the table nodes t_i = i * 2pi / nodes.
    [[nodiscard]] std::span<const double> arclength_table() const { return s_; }

    [[nodiscard]] double speed(double t) const { return std::hypot(a_ * std::sin(t), b_ * std::cos(t)); }

    [[nodiscard]] Vec2 position(double t) const { return {a_ * std::cos(t), b_ * std::sin(t)}; }

    [[nodiscard]] Vec2 unit_tangent(double t) const
    {
        const Vec2 d{-a_ * std::sin(t), b_ * std::cos(t)};
        return (1.0 / norm(d)) * d;
    }

    // s(t) for any real t, with s(t + 2pi) = s(t) + perimeter.
    [[nodiscard]] double arclength(double t) const
    {
        const double two_pi = 2.0 * std::numbers::pi;
        const double turns = std::floor(t / two_pi);
        const double r = t - turns * two_pi;
        const std::size_t i = std::min(static_cast<std::size_t>(r / dt_), nodes() - 1);
        const double ti = static_cast<double>(i) * dt_;
        return turns * perimeter_ + s_[i] + integrate_speed(ti, r);
    }

    // Inverse of arclength(): table lookup then Newton polishing.
    [[nodiscard]] double parameter(double s) const
    {
        const double turns = std::floor(s / perimeter_);
        double r = s - turns * perimeter_;
        if (r >= perimeter_) {
            r = 0.0;
        }
        auto it = std::upper_bound(s_.begin(), s_.end(), r);
        std::size_t i = static_cast<std::size_t>(std::distance(s_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, nodes()) - 1;
        const double ti = static_cast<double>(i) * dt_;
        double t = ti + (r - s_[i]) / (s_[i + 1] - s_[i]) * dt_;
        for (int k = 0; k < 8; ++k) {
            const double err = s_[i] + integrate_speed(ti, t) - r;
            const double step = err / speed(t);
            t -= step;
            if (std::abs(err) <= 1e-15 * perimeter_) {
                break;
            }
        }
        return t + turns * 2.0 * std::numbers::pi;
    }

    // Residual of the implicit equation at a point.
    [[nodiscard]] double implicit_residual(Vec2 p) const
    {
        return p.x * p.x / (a_ * a_) + p.y * p.y / (b_ * b_) - 1.0;
    }

private:
    // 8-point Gauss-Legendre on [t0, t1]; segments are at most 2pi/nodes wide.
    [[nodiscard]] double integrate_speed(double t0, double t1) const
    {
        static constexpr std::array<double, 4> xs{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                  0.9602898564975363};
        static constexpr std::array<double, 4> ws{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                  0.1012285362903763};
        const double c = 0.5 * (t0 + t1);
        const double h = 0.5 * (t1 - t0);
        double acc = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            acc += ws[k] * (speed(c - h * xs[k]) + speed(c + h * xs[k]));
        }
        return h * acc;
    }

    double a_;
    double b_;
    double dt_ = 0.0;
    double perimeter_ = 0.0;
    std::vector<double> s_;
};

struct PointAndTangent {
    Vec2 position;
    Vec2 tangent;
};

inline PointAndTangent point_and_tangent(const Ellipse &e, double s)
{
    const double t = e.parameter(s);
    return {e.position(t), e.unit_tangent(t)};
}

// One bounce with the geometric by-products the diagnostics need.
struct Bounce {
    BilliardState next;
    Vec2 from;
    Vec2 to;
    double chord = 0.0;
};

inline Bounce bounce(const Ellipse &e, BilliardState st)
{
    if (!(st.theta > grazing_margin && st.theta < std::numbers::pi - grazing_margin)) {
        throw GrazingInput("billiard: theta=" + std::to_string(st.theta) + " is grazing");
    }
    const double t = e.parameter(st.x);
    const Vec2 p = e.position(t);
    const Vec2 tan = e.unit_tangent(t);
    const Vec2 inward{-tan.y, tan.x};
    const Vec2 v = std::cos(st.theta) * tan + std::sin(st.theta) * inward;

    // P + lambda v on the conic: the constant term vanishes (P is on it), so the
    // second root is the ratio of the linear and quadratic coefficients.
    const double a2 = e.a() * e.a();
    const double b2 = e.b() * e.b();
    const double quad = v.x * v.x / a2 + v.y * v.y / b2;
    const double lin = p.x * v.x / a2 + p.y * v.y / b2;
    const double lambda = -2.0 * lin / quad;
    const Vec2 q = p + lambda * v;

    double t1 = std::atan2(q.y / e.b(), q.x / e.a());
    if (t1 < 0.0) {
        t1 += 2.0 * std::numbers::pi;
    }
    double s1 = e.arclength(t1);
    if (s1 >= e.perimeter()) {
        s1 -= e.perimeter();
    }
    const Vec2 tan1 = e.unit_tangent(t1);
    const Vec2 n1{-tan1.y, tan1.x};
    const Vec2 w = v - 2.0 * dot(v, n1) * n1;
    const double theta1 = std::atan2(cross(tan1, w), dot(tan1, w));
    return Bounce{BilliardState{s1, theta1}, p, q, lambda};
}

inline BilliardState next_collision(const Ellipse &e, BilliardState st) { return bounce(e, st).next; }

// (x, theta) -> (x, pi - theta): conjugates the map to its inverse.
inline BilliardState time_reversal(BilliardState st) { return {st.x, std::numbers::pi - st.theta}; }

// Normalized lift: x -> s/|Gamma|, y = theta/pi. Boundaries follow the grazing
// convention (y=0 identity, y=1 one full turn); interior images are lifted into
// (x, x+1].
inline AnnulusLift as_annulus_lift(const Ellipse &e)
{
    const std::string label = "billiard(a=" + std::to_string(e.a()) + ",b=" + std::to_string(e.b()) + ")";
    return AnnulusLift(
        [table = std::make_shared<const Ellipse>(e)](Point p) {
            const Ellipse &e = *table;
            if (p.y == 0.0) {
                return Point{p.x, 0.0};
            }
            if (p.y == 1.0) {
                return Point{p.x + 1.0, 1.0};
            }
            if (p.y < 0.0 || p.y > 1.0) {
                throw DomainEscape("billiard lift: y outside [0,1]");
            }
            const double fl = std::floor(p.x);
            const double frac = p.x - fl;
            const BilliardState next
                = next_collision(e, BilliardState{frac * e.perimeter(), p.y * std::numbers::pi});
            double x1 = fl + next.x / e.perimeter();
            while (x1 <= p.x) {
                x1 += 1.0;
            }
            while (x1 > p.x + 1.0) {
                x1 -= 1.0;
            }
            return Point{x1, next.theta / std::numbers::pi};
        },
        label, billiard_eq_tol);
}

struct TwistDerivativeReport {
    double finite_difference = 0.0;
    // tau(x, x1) / sin(theta1), theta1 the angle at the landing point.
    double closed_form = 0.0;
    double chord = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    // Same comparison with the departure angle: tau / sin(theta). Agrees only
    // when sin(theta1) = sin(theta), e.g. on the circle.
    double departure_form = 0.0;
    double departure_rel_residual = 0.0;
};

// Central difference of the landing arclength in theta against tau/sin(theta1).
inline TwistDerivativeReport twist_derivative_check(const Ellipse &e, BilliardState st, double h)
{
    if (!(h > 0.0) || !(st.theta > 2.0 * h && st.theta < std::numbers::pi - 2.0 * h)) {
        throw GrazingInput("twist_derivative_check: theta too close to grazing for step h");
    }
    const Bounce mid = bounce(e, st);
    const double sp = next_collision(e, {st.x, st.theta + h}).x;
    const double sm = next_collision(e, {st.x, st.theta - h}).x;
    double diff = sp - sm;
    const double P = e.perimeter();
    diff -= P * std::round(diff / P);

    TwistDerivativeReport r;
    r.finite_difference = diff / (2.0 * h);
    r.chord = mid.chord;
    r.closed_form = mid.chord / std::sin(mid.next.theta);
    r.abs_residual = std::abs(r.finite_difference - r.closed_form);
    r.rel_residual = r.abs_residual / std::abs(r.closed_form);
    r.departure_form = mid.chord / std::sin(st.theta);
    r.departure_rel_residual = std::abs(r.finite_difference - r.departure_form) / std::abs(r.departure_form);
    return r;
}

} // namespace twistlab
