#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "twistlab/billiard.hpp"
#include "twistlab/cover.hpp"
#include "twistlab/families.hpp"

using namespace twistlab;
using Catch::Matchers::WithinAbs;

namespace {

AnnulusLift shear_identity() { return shear(profile("identity"), "shear[identity]"); }

// Oracle that always answers with a fixed estimate.
RotationOracle fixed_oracle(double value, double halfwidth)
{
    return [=](const CircleLift &) { return RotationEstimate{value, halfwidth, 1, 0.0}; };
}

RotationOracle adaptive_oracle()
{
    return [](const CircleLift &g) { return rotation_number_adaptive(g, 1e-6); };
}

} // namespace

TEST_CASE("boundary restrictions of the identity shear")
{
    const AnnulusLift f = shear_identity();
    const CircleLift f0 = boundary_restriction(f, 0);
    const CircleLift f1 = boundary_restriction(f, 1);
    for (double x : {-1.3, 0.0, 0.25, 0.9, 7.5}) {
        CHECK(f0(x) == x);
        CHECK(f1(x) == x + 1.0);
    }
    CHECK_THROWS_AS(boundary_restriction(f, 2), std::invalid_argument);
}

TEST_CASE("boundary restriction of a locked suspension is the base map")
{
    const CircleLift g0 = arnold_circle(0.5, 0.25);
    const AnnulusLift f = locked_suspension(g0, 1, 2, 1e-3);
    const CircleLift r0 = boundary_restriction(f, 0);
    const CircleLift r1 = boundary_restriction(f, 1);
    for (double x : {0.0, 0.1, 0.37, 0.8}) {
        CHECK(r0(x) == g0(x));
        CHECK_THAT(r1(x), WithinAbs(g0(x) + 1e-3, 1e-15));
    }
}

TEST_CASE("iterate: shear translates along the circle")
{
    const auto seg = iterate(shear_identity(), Point{0.0, 0.5}, 4);
    REQUIRE(seg.length() == 4);
    REQUIRE(seg.points.size() == 5);
    for (std::size_t k = 0; k <= 4; ++k) {
        CHECK(seg.points[k] == Point{0.5 * static_cast<double>(k), 0.5});
    }
    CHECK(seg.origin() == Point{0.0, 0.5});
}

TEST_CASE("iterate: float family by direct substitution")
{
    const AnnulusLift f = float_map(profile("identity"), profile("square"));
    const auto seg = iterate(f, Point{0.0, 0.5}, 2);
    CHECK(seg.points[1] == Point{0.5, 0.25});
    CHECK(seg.points[2] == Point{0.75, 0.0625});
}

TEST_CASE("iterate: major-axis bounce returns shifted by one turn")
{
    const AnnulusLift f = as_annulus_lift(Ellipse(2.0, 1.0));
    const auto seg = iterate(f, Point{0.0, 0.5}, 2);
    CHECK_THAT(seg.points[1].x, WithinAbs(0.5, 1e-12));
    CHECK_THAT(seg.points[2].x, WithinAbs(1.0, 1e-12));
    CHECK_THAT(seg.points[2].y, WithinAbs(0.5, 1e-12));
}

TEST_CASE("iterate rejects bad input and escaping maps")
{
    CHECK_THROWS_AS(iterate(shear_identity(), Point{0.0, 0.5}, 0), std::invalid_argument);
    CHECK_THROWS_AS(iterate(shear_identity(), Point{0.0, 1.5}, 3), std::invalid_argument);
    const AnnulusLift bad([](Point p) { return Point{p.x, p.y + 0.3}; }, "escape");
    CHECK_THROWS_AS(iterate(bad, Point{0.0, 0.9}, 1), DomainEscape);
}

TEST_CASE("check_equivariance on exact, broken and billiard lifts")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::uniform_real_distribution<double> uy(0.0, 1.0);
    std::vector<Point> pts;
    for (int i = 0; i < 100; ++i) {
        pts.push_back(Point{ux(rng), uy(rng)});
    }

    const auto ok = check_equivariance(shear_identity(), pts, 1e-12);
    CHECK(ok.pass);
    CHECK(ok.max_equivariance_residual <= 1e-15);

    // (x+1, y) goes to the image of (x, y) shifted by 0.9 instead of 1.
    const AnnulusLift broken(
        [](Point p) {
            const double fl = std::floor(p.x);
            return Point{(p.x - fl) + 0.9 * fl + 0.1, p.y};
        },
        "broken");
    const auto bad = check_equivariance(broken, pts, 1e-12);
    CHECK_FALSE(bad.pass);
    CHECK_THAT(bad.max_equivariance_residual, WithinAbs(0.1, 1e-9));

    std::vector<Point> interior;
    for (auto p : pts) {
        interior.push_back(Point{p.x, 0.02 + 0.96 * p.y});
    }
    const auto bil = check_equivariance(as_annulus_lift(Ellipse(2.0, 1.0)), interior, 1e-8);
    CHECK(bil.pass);
}

TEST_CASE("validate rejects non-monotone boundaries")
{
    const AnnulusLift fold([](Point p) { return Point{p.x + 0.3 * std::sin(2.0 * std::numbers::pi * p.x), p.y}; },
                           "fold");
    CHECK_THROWS_AS(validate(fold), InvalidFamily);
    const CircleLift g([](double x) { return x + 0.3 * std::sin(2.0 * std::numbers::pi * x); }, "fold");
    CHECK_THROWS_AS(validate(g), InvalidFamily);
    CHECK_NOTHROW(validate(shear_identity()));
}

TEST_CASE("normalize_lift: integer shift")
{
    const AnnulusLift f([](Point p) { return Point{p.x + 2.3, p.y}; }, "rot2.3");
    const AnnulusLift g = normalize_lift(f, adaptive_oracle());
    CHECK_THAT(g(Point{0.1, 0.4}).x, WithinAbs(0.4, 1e-12));
    const auto rho = rotation_number_adaptive(boundary_restriction(g, 0), 1e-7);
    CHECK_THAT(rho.value, WithinAbs(0.3, 1e-7));
}

TEST_CASE("normalize_lift: exact zero rotation is unchanged")
{
    const AnnulusLift f = shear_identity();
    const AnnulusLift g = normalize_lift(f, adaptive_oracle());
    for (double x : {0.0, 0.3}) {
        for (double y : {0.0, 0.5, 1.0}) {
            CHECK(g(Point{x, y}) == f(Point{x, y}));
        }
    }
}

TEST_CASE("normalize_lift: estimate straddling an integer is ambiguous")
{
    const AnnulusLift f([](Point p) { return Point{p.x + 1.0 + 5e-7, p.y}; }, "near-one");
    CHECK_THROWS_AS(normalize_lift(f, fixed_oracle(1.0, 1e-6)), AmbiguousNormalization);
    CHECK_THROWS_AS(normalize_lift(f, fixed_oracle(0.3, 0.6)), AmbiguousNormalization);
}

TEST_CASE("property: normalize_lift is idempotent and lands in [0,1)")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(-5.0, 5.0);
    for (int i = 0; i < 25; ++i) {
        const double a = ua(rng);
        const AnnulusLift f([a](Point p) { return Point{p.x + a + 0.1 * p.y, p.y}; }, "rot");
        const AnnulusLift g = normalize_lift(f, adaptive_oracle());
        const AnnulusLift h = normalize_lift(g, adaptive_oracle());
        const double r = g(Point{0.0, 0.0}).x;
        CHECK(r >= -1e-12);
        CHECK(r < 1.0);
        CHECK(h(Point{0.2, 0.7}) == g(Point{0.2, 0.7}));
    }
}

TEST_CASE("property: iteration commutes with integer translation")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::uniform_int_distribution<int> uk(-4, 4);
    const AnnulusLift f = float_map(profile("identity"), profile("sqrt"));
    for (int i = 0; i < 50; ++i) {
        const Point p{ux(rng), ux(rng)};
        const int k = uk(rng);
        const auto a = iterate(f, p, 20);
        const auto b = iterate(f, Point{p.x + k, p.y}, 20);
        for (std::size_t j = 0; j < a.points.size(); ++j) {
            CHECK_THAT(b.points[j].x - a.points[j].x, WithinAbs(static_cast<double>(k), 1e-9));
            CHECK(b.points[j].y == a.points[j].y);
        }
    }
}

TEST_CASE("property: boundary restriction commutes with iteration")
{
    const AnnulusLift f = locked_suspension(arnold_circle(0.5, 0.25), 1, 2, 1e-3);
    for (int i = 0; i < 2; ++i) {
        const CircleLift g = boundary_restriction(f, i);
        const auto orbit = iterate(f, Point{0.123, static_cast<double>(i)}, 50);
        const auto xs = iterate(g, 0.123, 50);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            CHECK(orbit.points[k].x == xs[k]);
            CHECK(orbit.points[k].y == static_cast<double>(i));
        }
    }
}

TEST_CASE("has_integer_fixed_point")
{
    CHECK(has_integer_fixed_point(CircleLift([](double x) { return x; }, "id"), 0.0));
    CHECK(has_integer_fixed_point(arnold_circle(0.0, 0.5), 0.0));
    CHECK_FALSE(has_integer_fixed_point(rigid_rotation(0.3), 0.0));
}
