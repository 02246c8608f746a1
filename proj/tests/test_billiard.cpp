#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/ellint_2.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "twistlab/annulus.hpp"
#include "twistlab/billiard.hpp"
#include "twistlab/curves.hpp"

using namespace twistlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

// Perimeter 4 a E(e), e^2 = 1 - b^2/a^2.
double perimeter_oracle(double a, double b) { return 4.0 * a * boost::math::ellint_2(std::sqrt(1.0 - b * b / (a * a))); }

} // namespace

TEST_CASE("ellipse perimeter against the complete elliptic integral")
{
    for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{1.0, 1.0}, std::pair{5.0, 0.3}, std::pair{1.2, 1.1}}) {
        const Ellipse e(a, b);
        CHECK_THAT(e.perimeter(), WithinRel(perimeter_oracle(a, b), 1e-11));
    }
    CHECK_THAT(Ellipse(1.0, 1.0).perimeter(), WithinAbs(2.0 * pi, 1e-12));
}

TEST_CASE("ellipse constructor rejects bad axes")
{
    CHECK_THROWS_AS(Ellipse(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Ellipse(1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(Ellipse(2.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("arclength and parameter are inverse")
{
    const Ellipse e(2.0, 1.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0 * e.perimeter(), 3.0 * e.perimeter());
    for (int i = 0; i < 1000; ++i) {
        const double s = u(rng);
        CHECK_THAT(e.arclength(e.parameter(s)), WithinAbs(s, 1e-11));
    }
    // Quarter perimeter at t = pi/2 by symmetry.
    CHECK_THAT(e.arclength(pi / 2.0), WithinAbs(e.perimeter() / 4.0, 1e-12));
}

TEST_CASE("point_and_tangent anchors")
{
    const Ellipse e(2.0, 1.0);
    const auto p0 = point_and_tangent(e, 0.0);
    CHECK_THAT(p0.position.x, WithinAbs(2.0, 1e-12));
    CHECK_THAT(p0.position.y, WithinAbs(0.0, 1e-12));
    CHECK_THAT(p0.tangent.x, WithinAbs(0.0, 1e-12));
    CHECK_THAT(p0.tangent.y, WithinAbs(1.0, 1e-12));
    const auto ph = point_and_tangent(e, e.perimeter() / 2.0);
    CHECK_THAT(ph.position.x, WithinAbs(-2.0, 1e-10));
    CHECK_THAT(ph.position.y, WithinAbs(0.0, 1e-10));
    CHECK_THAT(ph.tangent.x, WithinAbs(0.0, 1e-10));
    CHECK_THAT(ph.tangent.y, WithinAbs(-1.0, 1e-10));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, e.perimeter());
    for (int i = 0; i < 1000; ++i) {
        CHECK(std::abs(e.implicit_residual(point_and_tangent(e, u(rng)).position)) <= 1e-10);
    }
}

TEST_CASE("axis bounces")
{
    const Ellipse e(2.0, 1.0);
    const double P = e.perimeter();
    const auto major = next_collision(e, {0.0, pi / 2.0});
    CHECK_THAT(major.x, WithinAbs(P / 2.0, 1e-10));
    CHECK_THAT(major.theta, WithinAbs(pi / 2.0, 1e-10));
    const auto minor = next_collision(e, {P / 4.0, pi / 2.0});
    CHECK_THAT(minor.x, WithinAbs(3.0 * P / 4.0, 1e-10));
    CHECK_THAT(minor.theta, WithinAbs(pi / 2.0, 1e-10));
    for (const BilliardState st : {BilliardState{0.0, pi / 2.0}, BilliardState{P / 4.0, pi / 2.0}}) {
        const auto back = next_collision(e, next_collision(e, st));
        const double dx = back.x - st.x;
        CHECK_THAT(dx - P * std::round(dx / P), WithinAbs(0.0, 1e-8));
        CHECK_THAT(back.theta, WithinAbs(st.theta, 1e-8));
    }
}

TEST_CASE("grazing input is rejected")
{
    const Ellipse e(2.0, 1.0);
    CHECK_THROWS_AS(next_collision(e, {0.3, 0.0}), GrazingInput);
    CHECK_THROWS_AS(next_collision(e, {0.3, 5e-10}), GrazingInput);
    CHECK_THROWS_AS(next_collision(e, {0.3, pi}), GrazingInput);
    CHECK_THROWS_AS(twist_derivative_check(e, {0.3, 1e-6}, 1e-6), GrazingInput);
    const AnnulusLift f = as_annulus_lift(e);
    CHECK_THROWS_AS(f(Point{0.2, 1e-11}), GrazingInput);
    CHECK_THROWS_AS(f(Point{0.2, 1.5}), DomainEscape);
}

TEST_CASE("circle table: theta conserved and constant advance")
{
    const Ellipse e(1.0, 1.0);
    for (double th : {0.3, 1.0, 2.5}) {
        BilliardState st{0.4, th};
        const double advance = 2.0 * th; // arc subtended by the chord, radius 1
        for (int k = 0; k < 200; ++k) {
            const auto nx = next_collision(e, st);
            CHECK_THAT(nx.theta, WithinAbs(th, 1e-10));
            double d = nx.x - st.x;
            d -= e.perimeter() * std::floor(d / e.perimeter());
            CHECK_THAT(d, WithinAbs(advance, 1e-9));
            st = nx;
        }
    }
}

TEST_CASE("lift boundaries and the circle's half-turn slice")
{
    const AnnulusLift f = as_annulus_lift(Ellipse(2.0, 1.0));
    CHECK(f(Point{0.3, 0.0}) == Point{0.3, 0.0});
    CHECK(f(Point{0.3, 1.0}) == Point{1.3, 1.0});
    const AnnulusLift c = as_annulus_lift(Ellipse(1.0, 1.0));
    for (double x : {0.0, 0.1, 0.77}) {
        const Point q = c(Point{x, 0.5});
        CHECK_THAT(q.x, WithinAbs(x + 0.5, 1e-10));
        CHECK_THAT(q.y, WithinAbs(0.5, 1e-10));
    }
    // Images land in (x, x+1].
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Point p{4.0 * u(rng) - 2.0, 0.001 + 0.998 * u(rng)};
        const Point q = f(p);
        CHECK(q.x > p.x);
        CHECK(q.x <= p.x + 1.0);
    }
}

TEST_CASE("reversibility")
{
    const Ellipse e(2.0, 1.0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ux(0.0, e.perimeter());
    std::uniform_real_distribution<double> ut(0.05, pi - 0.05);
    for (int i = 0; i < 200; ++i) {
        const BilliardState st{ux(rng), ut(rng)};
        const auto back = time_reversal(next_collision(e, time_reversal(next_collision(e, st))));
        double dx = back.x - st.x;
        dx -= e.perimeter() * std::round(dx / e.perimeter());
        CHECK(std::abs(dx) <= 1e-8);
        CHECK(std::abs(back.theta - st.theta) <= 1e-8);
    }
}

TEST_CASE("twist derivative identity")
{
    const Ellipse e(2.0, 1.0);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ux(0.0, e.perimeter());
    std::uniform_real_distribution<double> ut(0.1, pi - 0.1);
    for (int i = 0; i < 100; ++i) {
        const auto r = twist_derivative_check(e, {ux(rng), ut(rng)}, 1e-6);
        CHECK(r.rel_residual <= 1e-4);
        CHECK(r.finite_difference > 0.0);
    }

    const Ellipse c(1.0, 1.0);
    const auto d = twist_derivative_check(c, {0.7, pi / 2.0}, 1e-6);
    CHECK_THAT(d.chord, WithinAbs(2.0, 1e-10));
    CHECK_THAT(d.closed_form, WithinAbs(2.0, 1e-10));
    CHECK_THAT(d.finite_difference, WithinAbs(2.0, 1e-6));
    // On the circle both angle conventions coincide.
    CHECK_THAT(d.departure_form, WithinAbs(2.0, 1e-10));
}

TEST_CASE("twist derivative is bounded below on a state grid")
{
    const Ellipse e(2.0, 1.0);
    double floor_c = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 32; ++i) {
        for (int j = 0; j < 32; ++j) {
            const double th = (j + 0.5) / 32.0 * pi;
            const auto b = bounce(e, {i / 32.0 * e.perimeter(), th});
            floor_c = std::min(floor_c, b.chord / std::sin(b.next.theta));
        }
    }
    CHECK(floor_c > 0.0);
}

TEST_CASE("twist condition away from the grazing collars")
{
    const auto r = check_twist(as_annulus_lift(Ellipse(2.0, 1.0)), 32, 32, 0.0, 1e-3, 1.0 - 1e-3);
    CHECK(r.is_twist);
    CHECK(r.min_increment > 0.0);
}

TEST_CASE("rotation samples of billiard orbits lie in [0,1]")
{
    const AnnulusLift f = as_annulus_lift(Ellipse(2.0, 1.0));
    for (double y : {0.05, 0.3, 0.5, 0.8, 0.97}) {
        const auto s = rotation_sample(f, Point{0.1, y}, 5000, 3);
        CHECK(s.lower >= -1e-4);
        CHECK(s.upper <= 1.0 + 1e-4);
    }
}

TEST_CASE("property: collision points stay on the ellipse along long orbits")
{
    const Ellipse e(2.0, 1.0);
    BilliardState st{0.123, 0.7};
    double worst = 0.0;
    for (int k = 0; k < 10'000; ++k) {
        const auto b = bounce(e, st);
        worst = std::max(worst, std::abs(e.implicit_residual(b.to)));
        st = b.next;
    }
    CHECK(worst <= 1e-10);
}
