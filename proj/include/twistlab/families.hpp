#pragma once

// Built-in example systems with ground-truth metadata.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twistlab/billiard.hpp"
#include "twistlab/circle.hpp"
#include "twistlab/cover.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

using ScalarFn = std::function<double(double)>;

enum class FamilyKind { rigid, arnold_circle, shear, float_map, locked_suspension, eye_map, billiard };

inline std::string to_string(FamilyKind k)
{
    switch (k) {
    case FamilyKind::rigid:
        return "rigid";
    case FamilyKind::arnold_circle:
        return "arnold";
    case FamilyKind::shear:
        return "shear";
    case FamilyKind::float_map:
        return "float";
    case FamilyKind::locked_suspension:
        return "locked";
    case FamilyKind::eye_map:
        return "eye";
    case FamilyKind::billiard:
        return "billiard";
    }
    return "unknown";
}

inline FamilyKind family_kind_from_string(const std::string &s)
{
    for (auto k : {FamilyKind::rigid, FamilyKind::arnold_circle, FamilyKind::shear, FamilyKind::float_map,
                   FamilyKind::locked_suspension, FamilyKind::eye_map, FamilyKind::billiard}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw ConfigError("unknown family kind '" + s + "'");
}

inline bool is_circle_kind(FamilyKind k) { return k == FamilyKind::rigid || k == FamilyKind::arnold_circle; }

struct GroundTruth {
    double rho0 = 0.0;
    double rho1 = 0.0;
    // Rotation set: the whole twist interval, or the finite set `values`.
    bool rotation_set_is_interval = true;
    std::vector<double> values;
    bool non_wandering = false;
    bool twist = true;
};

struct FamilySpec {
    FamilyKind kind = FamilyKind::shear;
    std::map<std::string, double> params;
    std::map<std::string, std::string> options;
    std::optional<GroundTruth> truth;

    [[nodiscard]] double param(const std::string &key, double fallback) const
    {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
    [[nodiscard]] std::string option(const std::string &key, const std::string &fallback) const
    {
        auto it = options.find(key);
        return it == options.end() ? fallback : it->second;
    }
};

struct Family {
    std::string name;
    FamilySpec spec;
    AnnulusLift lift;
    GroundTruth truth;
};

// Named profiles usable as phi or psi.
inline ScalarFn profile(const std::string &name, double c = 0.0)
{
    if (name == "identity") {
        return [](double y) { return y; };
    }
    if (name == "square") {
        return [](double y) { return y * y; };
    }
    if (name == "sqrt") {
        return [](double y) { return std::sqrt(y); };
    }
    if (name == "sine") {
        return [](double y) { return 0.5 * (1.0 + std::sin(0.5 * std::numbers::pi * y)); };
    }
    if (name == "constant") {
        return [c](double) { return c; };
    }
    throw ConfigError("unknown profile '" + name + "' (identity, square, sqrt, sine, constant)");
}

namespace detail {

inline void require_nondecreasing(const ScalarFn &fn, const std::string &what, bool strict)
{
    constexpr int m = 256;
    double prev = fn(0.0);
    for (int i = 1; i <= m; ++i) {
        const double v = fn(static_cast<double>(i) / m);
        if (!std::isfinite(v) || v < prev || (strict && v == prev)) {
            throw InvalidFamily(what + " is not " + (strict ? "strictly increasing" : "monotone increasing")
                                + " near y=" + std::to_string(static_cast<double>(i) / m));
        }
        prev = v;
    }
}

} // namespace detail

inline CircleLift rigid_rotation(double alpha)
{
    return CircleLift([alpha](double x) { return x + alpha; }, "rigid(" + std::to_string(alpha) + ")");
}

inline CircleLift arnold_circle(double omega, double eps)
{
    if (!(eps >= 0.0 && eps < 1.0)) {
        throw InvalidFamily("arnold_circle: need 0 <= eps < 1");
    }
    const double k = eps / (2.0 * std::numbers::pi);
    return CircleLift([omega, k](double x) { return x + omega + k * std::sin(2.0 * std::numbers::pi * x); },
                      "arnold(" + std::to_string(omega) + "," + std::to_string(eps) + ")");
}

// (x, y) -> (x + phi(y), y)
inline AnnulusLift shear(ScalarFn phi, std::string label = "shear")
{
    detail::require_nondecreasing(phi, label + ": phi", false);
    AnnulusLift f([phi](Point p) { return Point{p.x + phi(p.y), p.y}; }, std::move(label));
    validate(f);
    return f;
}

// (x, y) -> (x + phi(y), psi(y))
inline AnnulusLift float_map(ScalarFn phi, ScalarFn psi, std::string label = "float")
{
    detail::require_nondecreasing(phi, label + ": phi", false);
    detail::require_nondecreasing(psi, label + ": psi", true);
    if (std::abs(psi(0.0)) > default_eq_tol || std::abs(psi(1.0) - 1.0) > default_eq_tol) {
        throw InvalidFamily(label + ": psi must fix 0 and 1");
    }
    AnnulusLift f([phi, psi](Point p) { return Point{p.x + phi(p.y), psi(p.y)}; }, std::move(label));
    validate(f);
    return f;
}

// (x, y) -> (g0(x) + y*eps0, y): the slice y is the circle map g0 + y*eps0.
// Requires rho(g0 + t) = p/q for every t in [0, eps0], certified through
// locking_interval on t -> g0 + t.
inline AnnulusLift locked_suspension(const CircleLift &g0, std::int64_t p, std::int64_t q, double eps0,
                                     LockingInterval *certificate = nullptr)
{
    if (!(eps0 > 0.0)) {
        throw InvalidFamily("locked_suspension: eps0 must be > 0");
    }
    validate(g0);
    const CircleFamily fam = [g0](double t) { return g0.shifted(t); };
    LockingInterval li;
    try {
        li = locking_interval(fam, p, q, -1.0, 1.0, 1e-10);
    }
    catch (const TongueMissed &e) {
        throw NotLocked(g0.label() + ": not locked at " + std::to_string(p) + "/" + std::to_string(q) + " ("
                        + e.what() + ")");
    }
    if (li.t_lo > 0.0 || li.t_hi < eps0) {
        throw NotLocked(g0.label() + ": tongue [" + std::to_string(li.t_lo) + ", " + std::to_string(li.t_hi)
                        + "] does not contain [0, " + std::to_string(eps0) + "]");
    }
    if (certificate != nullptr) {
        *certificate = li;
    }
    AnnulusLift f([g0, eps0](Point pt) { return Point{g0(pt.x) + pt.y * eps0, pt.y}; },
                  "locked(" + g0.label() + ",eps0=" + std::to_string(eps0) + ")");
    validate(f);
    return f;
}

// Anchor data of the eye map: f0(x) = x + 1/2 on [1/6, 1/3] and on [2/3, 5/6]
// (mod 1). The gaps are filled by C^1 cubic Hermite pieces with a node at the
// period-2 orbit {0, 1/2}, where f0' = slope. With slope > 1 that orbit is
// repelling and the remaining gap points drift to the band edges.
struct EyeMapSpec {
    double slope = 1.5;
    double eps0 = 0.004;
};

// Largest |eps| for which f0 + eps still has period-2 points:
// max |f0(x) - x - 1/2| = (slope - 1)/6 * 4/27.
inline double eye_locking_halfwidth(double slope) { return (slope - 1.0) / 6.0 * 4.0 / 27.0; }

inline CircleLift eye_base(double slope)
{
    if (!(slope > 1.0 && slope < 4.0)) {
        throw InvalidFamily("eye map: node slope must lie in (1, 4)");
    }
    const double amp = (slope - 1.0) / 6.0;
    // f0(x) = x + 1/2 + d(x), with d of period 1/2.
    auto disp = [amp](double x) {
        const double u = x - 0.5 * std::floor(2.0 * x);
        if (u < 1.0 / 6.0) {
            const double t = 6.0 * u;
            return amp * t * (1.0 - t) * (1.0 - t);
        }
        if (u > 1.0 / 3.0) {
            const double t = 6.0 * (u - 1.0 / 3.0);
            return amp * (t * t * t - t * t);
        }
        return 0.0;
    };
    return CircleLift([disp](double x) { return x + 0.5 + disp(x); }, "eye_f0(" + std::to_string(slope) + ")");
}

// (x, y) -> (f0(x) + e(y), y) with e(y) = (2y - 1) * eps0, so y = 1/2 is the
// unperturbed slice and the boundaries are f0 -+ eps0.
inline AnnulusLift eye_map(const EyeMapSpec &spec = {})
{
    const CircleLift f0 = eye_base(spec.slope);
    validate(f0);
    if (!(spec.eps0 > 0.0)) {
        throw InvalidFamily("eye map: eps0 must be > 0");
    }
    for (double s : {-spec.eps0, spec.eps0}) {
        if (!is_locked(f0.shifted(s), 1, 2)) {
            throw InvalidFamily("eye map: f0 + " + std::to_string(s) + " has no period-2 orbit; reduce eps0 below "
                                + std::to_string(eye_locking_halfwidth(spec.slope)));
        }
    }
    const double eps0 = spec.eps0;
    AnnulusLift f([f0, eps0](Point p) { return Point{f0(p.x) + (2.0 * p.y - 1.0) * eps0, p.y}; },
                  "eye(slope=" + std::to_string(spec.slope) + ",eps0=" + std::to_string(eps0) + ")");
    validate(f);
    return f;
}

// Real slice parameter of the eye map for a normalized y.
inline double eye_slice(const EyeMapSpec &spec, double y) { return (2.0 * y - 1.0) * spec.eps0; }

inline bool in_eye_band(double x)
{
    const double u = x - 0.5 * std::floor(2.0 * x);
    return u >= 1.0 / 6.0 && u <= 1.0 / 3.0;
}

inline CircleLift build_circle(const FamilySpec &spec)
{
    switch (spec.kind) {
    case FamilyKind::rigid:
        return rigid_rotation(spec.param("alpha", 0.0));
    case FamilyKind::arnold_circle:
        return arnold_circle(spec.param("omega", 0.5), spec.param("eps", 0.25));
    default:
        throw ConfigError("family '" + to_string(spec.kind) + "' is not a circle family");
    }
}

inline Family build_family(const FamilySpec &spec)
{
    switch (spec.kind) {
    case FamilyKind::shear: {
        const std::string name = spec.option("phi", "identity");
        const ScalarFn phi = profile(name, spec.param("c", 0.0));
        GroundTruth t{phi(0.0), phi(1.0), true, {}, true, phi(1.0) > phi(0.0)};
        return Family{"shear[" + name + "]", spec, shear(phi, "shear[" + name + "]"), spec.truth.value_or(t)};
    }
    case FamilyKind::float_map: {
        const std::string pn = spec.option("phi", "identity");
        const std::string qn = spec.option("psi", "square");
        const ScalarFn phi = profile(pn, spec.param("c", 0.0));
        const ScalarFn psi = profile(qn);
        GroundTruth t{phi(0.0), phi(1.0), true, {}, false, phi(1.0) > phi(0.0)};
        if (qn == "identity") {
            t.non_wandering = true;
        }
        else {
            // The named non-identity psi profiles fix only 0 and 1.
            t.rotation_set_is_interval = false;
            t.values = {phi(0.0), phi(1.0)};
        }
        const std::string name = "float[" + pn + "," + qn + "]";
        return Family{name, spec, float_map(phi, psi, name), spec.truth.value_or(t)};
    }
    case FamilyKind::locked_suspension: {
        const auto p = static_cast<std::int64_t>(spec.param("p", 1.0));
        const auto q = static_cast<std::int64_t>(spec.param("q", 2.0));
        const CircleLift g0 = arnold_circle(spec.param("omega", 0.5), spec.param("eps", 0.25));
        const double r = static_cast<double>(p) / static_cast<double>(q);
        GroundTruth t{r, r, false, {r}, false, true};
        return Family{"locked[" + g0.label() + "]", spec, locked_suspension(g0, p, q, spec.param("eps0", 1e-3)),
                      spec.truth.value_or(t)};
    }
    case FamilyKind::eye_map: {
        const EyeMapSpec es{spec.param("slope", 1.5), spec.param("eps0", 0.004)};
        GroundTruth t{0.5, 0.5, false, {0.5}, false, true};
        return Family{"eye", spec, eye_map(es), spec.truth.value_or(t)};
    }
    case FamilyKind::billiard: {
        const Ellipse e(spec.param("a", 2.0), spec.param("b", 1.0));
        GroundTruth t{0.0, 1.0, true, {}, true, true};
        AnnulusLift lift = as_annulus_lift(e);
        validate(lift);
        return Family{"billiard", spec, std::move(lift), spec.truth.value_or(t)};
    }
    default:
        throw ConfigError("family '" + to_string(spec.kind) + "' is not an annulus family");
    }
}

// The standard zoo used by the verification harness.
inline std::vector<FamilySpec> zoo_specs()
{
    std::vector<FamilySpec> z;
    z.push_back({FamilyKind::shear, {}, {{"phi", "identity"}}, {}});
    z.push_back({FamilyKind::shear, {}, {{"phi", "square"}}, {}});
    z.push_back({FamilyKind::shear, {}, {{"phi", "sine"}}, {}});
    z.push_back({FamilyKind::float_map, {}, {{"phi", "identity"}, {"psi", "square"}}, {}});
    z.push_back({FamilyKind::float_map, {}, {{"phi", "identity"}, {"psi", "sqrt"}}, {}});
    z.push_back({FamilyKind::locked_suspension, {{"omega", 0.5}, {"eps", 0.25}, {"p", 1}, {"q", 2}, {"eps0", 1e-3}},
                 {}, {}});
    z.push_back({FamilyKind::locked_suspension, {{"omega", 0.0}, {"eps", 0.5}, {"p", 0}, {"q", 1}, {"eps0", 0.05}},
                 {}, {}});
    z.push_back({FamilyKind::eye_map, {{"slope", 1.5}, {"eps0", 0.004}}, {}, {}});
    z.push_back({FamilyKind::billiard, {{"a", 2.0}, {"b", 1.0}}, {}, {}});
    return z;
}

inline std::vector<Family> zoo()
{
    std::vector<Family> out;
    for (const auto &s : zoo_specs()) {
        out.push_back(build_family(s));
    }
    return out;
}

} // namespace twistlab
