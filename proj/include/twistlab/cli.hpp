#pragma once

// Subcommands of the twistlab tool as plain functions: each takes a RunConfig
// and returns the text it would emit plus an exit status.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "twistlab/annulus.hpp"
#include "twistlab/billiard.hpp"
#include "twistlab/circle.hpp"
#include "twistlab/config.hpp"
#include "twistlab/curves.hpp"
#include "twistlab/error.hpp"
#include "twistlab/families.hpp"
#include "twistlab/io.hpp"

namespace twistlab {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int claim_failed = 1;
inline constexpr int config = 2;
inline constexpr int budget = 3;
inline constexpr int tongue_missed = 4;
inline constexpr int analysis = 5;
} // namespace exit_code

struct CommandOutput {
    int status = exit_code::ok;
    // Main payload: JSON for summaries, CSV for phase-portrait.
    std::string main;
    // Optional point-cloud CSV (rotation-set, recurrence).
    std::string csv;
    std::string diagnostic;
};

namespace detail {

inline const FamilySpec &require_family(const RunConfig &cfg)
{
    if (!cfg.family) {
        throw ConfigError("no family given (use --family or [family] family = ...)");
    }
    return *cfg.family;
}

inline Family require_annulus(const RunConfig &cfg)
{
    const FamilySpec &spec = require_family(cfg);
    if (is_circle_kind(spec.kind)) {
        throw ConfigError("family '" + to_string(spec.kind) + "' is a circle family; this command needs an annulus map");
    }
    return build_family(spec);
}

inline Json estimate_json(const RotationEstimate &r)
{
    Json j;
    j["value"] = r.value;
    j["halfwidth"] = r.halfwidth;
    j["iterations"] = r.iterations;
    j["seed_x"] = r.seed;
    return j;
}

inline Json twist_json(const TwistInterval &ti)
{
    Json j;
    j["rho0"] = estimate_json(ti.rho0);
    j["rho1"] = estimate_json(ti.rho1);
    return j;
}

inline Json report_json(const GraphReport &g)
{
    Json j;
    j["is_graph"] = g.is_graph;
    j["single_valued"] = g.single_valued;
    j["lipschitz_estimate"] = g.lipschitz_estimate;
    j["lipschitz_bound_used"] = g.lipschitz_bound_used;
    j["invariance_residual"] = g.invariance_residual;
    j["max_bin_diameter"] = g.max_bin_diameter;
    j["bin_width"] = g.bin_width;
    return j;
}

inline std::vector<Point> horizontal_seeds(double y, std::size_t m)
{
    std::vector<Point> s;
    for (std::size_t i = 0; i < m; ++i) {
        s.push_back(Point{static_cast<double>(i) / static_cast<double>(m), y});
    }
    return s;
}

} // namespace detail

inline CommandOutput cmd_rotnum(const RunConfig &cfg)
{
    const FamilySpec &spec = detail::require_family(cfg);
    AdaptiveOptions opt;
    opt.max_iterations = cfg.max_iterations;
    Json j;
    RotationEstimate r;
    if (is_circle_kind(spec.kind)) {
        if (cfg.boundary) {
            throw ConfigError("'boundary' applies only to annulus families");
        }
        r = rotation_number_adaptive(build_circle(spec), cfg.tol, opt);
    }
    else {
        if (!cfg.boundary) {
            throw ConfigError("annulus family '" + to_string(spec.kind) + "' needs boundary = 0 or 1");
        }
        r = rotation_number_adaptive(boundary_restriction(build_family(spec).lift, *cfg.boundary), cfg.tol, opt);
    }
    return {exit_code::ok, to_json_text(detail::estimate_json(r)), {}, {}};
}

inline CommandOutput cmd_twist_interval(const RunConfig &cfg)
{
    const Family fam = detail::require_annulus(cfg);
    AdaptiveOptions opt;
    opt.max_iterations = cfg.max_iterations;
    const BoundaryTwist bt = boundary_twist_condition(fam.lift, cfg.tol, opt);
    Json j;
    j["family"] = fam.name;
    j["tol"] = cfg.tol;
    j["rho0"] = detail::estimate_json(bt.interval.rho0);
    j["rho1"] = detail::estimate_json(bt.interval.rho1);
    if (bt.certified) {
        j["separated"] = true;
    }
    else {
        j["separated"] = "undecided";
    }
    return {exit_code::ok, to_json_text(j), {}, {}};
}

inline CommandOutput cmd_rotation_set(const RunConfig &cfg)
{
    const Family fam = detail::require_annulus(cfg);
    RotationSetOptions opt;
    opt.n = cfg.n;
    opt.window = cfg.window;
    opt.bins = cfg.bins;
    opt.twist_tol = cfg.tol;
    opt.threads = cfg.threads;
    const auto est = rotation_set(fam.lift, cfg.nx, cfg.ny, opt);

    CsvWriter csv({"x", "y", "lower", "upper", "n"});
    for (const auto &s : est.samples) {
        csv.row(s.point.x, s.point.y, s.lower, s.upper, s.n);
    }

    Json j;
    j["family"] = fam.name;
    j["grid"] = {{"nx", cfg.nx}, {"ny", cfg.ny}};
    j["n"] = cfg.n;
    j["window"] = cfg.window;
    j["samples"] = est.samples.size();
    j["hull"] = {est.hull_lo, est.hull_hi};
    j["hull_width"] = est.hull_width();
    j["histogram"] = {{"lo", est.histogram.lo}, {"bin_width", est.histogram.bin_width},
                      {"counts", est.histogram.counts}};
    j["twist_interval"] = detail::twist_json(est.twist);
    j["containment"] = {{"verdict", est.containment.contained ? "contained" : "violated"},
                        {"max_below", est.containment.max_below},
                        {"max_above", est.containment.max_above},
                        {"slack", est.containment.slack}};
    return {exit_code::ok, to_json_text(j), csv.text(), {}};
}

// Seeds alternate between x = 0 and x = 1/4 with y evenly spread in (0,1).
inline std::vector<Point> portrait_seeds(std::size_t count)
{
    std::vector<Point> s;
    for (std::size_t i = 0; i < count; ++i) {
        s.push_back(Point{(i % 2 == 0) ? 0.0 : 0.25, (static_cast<double>(i) + 0.5) / static_cast<double>(count)});
    }
    return s;
}

inline CommandOutput cmd_phase_portrait(const RunConfig &cfg)
{
    const Family fam = detail::require_annulus(cfg);
    const auto seeds = portrait_seeds(cfg.seeds);
    CsvWriter csv({"orbit_id", "step", "x", "y"});
    for (std::size_t id = 0; id < seeds.size(); ++id) {
        const auto orbit = iterate(fam.lift, seeds[id], cfg.steps);
        for (std::size_t k = 0; k < orbit.points.size(); ++k) {
            const Point p = orbit.points[k];
            csv.row(id, k, wrap01(p.x), p.y);
        }
    }
    return {exit_code::ok, csv.text(), {}, {}};
}

// Parameter family used by `tongue`: omega (arnold) or alpha (rigid) replaced by t.
inline CircleFamily tongue_family(const FamilySpec &spec)
{
    switch (spec.kind) {
    case FamilyKind::arnold_circle: {
        const double eps = spec.param("eps", 0.25);
        arnold_circle(0.0, eps);
        return [eps](double t) { return arnold_circle(t, eps); };
    }
    case FamilyKind::rigid:
        return [](double t) { return rigid_rotation(t); };
    default:
        throw ConfigError("tongue needs a circle family (arnold or rigid)");
    }
}

inline CommandOutput cmd_tongue(const RunConfig &cfg)
{
    const FamilySpec &spec = detail::require_family(cfg);
    const LockingInterval li = locking_interval(tongue_family(spec), cfg.tongue_p, cfg.tongue_q, cfg.t_lo, cfg.t_hi, cfg.tol);
    Json j;
    j["p"] = li.p;
    j["q"] = li.q;
    j["t_lo"] = li.t_lo;
    j["t_hi"] = li.t_hi;
    j["tol"] = li.tol;
    return {exit_code::ok, to_json_text(j), {}, {}};
}

inline CommandOutput cmd_curves(const RunConfig &cfg)
{
    const Family fam = detail::require_annulus(cfg);
    const auto s1 = detail::horizontal_seeds(cfg.curve_y1, cfg.curve_seeds);
    const auto s2 = detail::horizontal_seeds(cfg.curve_y2, cfg.curve_seeds);
    const CurveCandidate c1 = trace_curve(fam.lift, s1, cfg.curve_n);
    const CurveCandidate c2 = trace_curve(fam.lift, s2, cfg.curve_n);
    const TwistReport tr = check_twist(fam.lift, 64, 33, 0.0);
    const double L = working_lipschitz_bound(tr);
    const GraphReport g1 = birkhoff_graph_check(fam.lift, c1, L, cfg.tol);
    const GraphReport g2 = birkhoff_graph_check(fam.lift, c2, L, cfg.tol);
    const DistinctReport d = distinct_rotation_check(fam.lift, c1, c2, cfg.tol);

    Json j;
    j["family"] = fam.name;
    j["curve1"] = {{"seed_y", cfg.curve_y1}, {"points", c1.points.size()}, {"gap_max", c1.gap_max},
                   {"graph", detail::report_json(g1)}, {"rho", detail::estimate_json(d.rho1)}};
    j["curve2"] = {{"seed_y", cfg.curve_y2}, {"points", c2.points.size()}, {"gap_max", c2.gap_max},
                   {"graph", detail::report_json(g2)}, {"rho", detail::estimate_json(d.rho2)}};
    j["min_separation"] = d.min_separation;
    j["verdict"] = to_string(d.verdict);
    return {exit_code::ok, to_json_text(j), {}, {}};
}

inline CommandOutput cmd_recurrence(const RunConfig &cfg)
{
    const Family fam = detail::require_annulus(cfg);
    const auto grid = annulus_grid(cfg.nx, cfg.ny);
    const RecurrenceMap rm = recurrence_scan(fam.lift, grid, cfg.max_iter, cfg.radius, cfg.threads);
    CsvWriter csv({"x", "y", "returned", "first_return"});
    for (std::size_t i = 0; i < rm.grid.size(); ++i) {
        csv.row(rm.grid[i].x, rm.grid[i].y, static_cast<int>(rm.returned[i]), rm.first_return[i]);
    }
    Json j;
    j["family"] = fam.name;
    j["grid"] = {{"nx", cfg.nx}, {"ny", cfg.ny}};
    j["max_iterations"] = rm.max_iterations;
    j["eps"] = rm.eps;
    j["returned"] = rm.count();
    j["total"] = rm.grid.size();
    return {exit_code::ok, to_json_text(j), csv.text(), {}};
}

// ---- verify -----------------------------------------------------------------

struct ClaimRow {
    std::string id;
    std::string family;
    std::string expected;
    std::string observed;
    bool pass = false;
    Json measured = Json::object();
};

inline Json claim_json(const ClaimRow &r)
{
    Json j;
    j["claim"] = r.id;
    j["family"] = r.family;
    j["expected"] = r.expected;
    j["observed"] = r.observed;
    j["verdict"] = r.pass ? "pass" : "fail";
    j["measured"] = r.measured;
    return j;
}

inline std::vector<ClaimRow> run_claims(const RunConfig &cfg)
{
    std::vector<ClaimRow> rows;
    const auto families = zoo();
    const auto assumed = [&](const Family &f) {
        return std::find(cfg.assume_nonwandering.begin(), cfg.assume_nonwandering.end(), to_string(f.spec.kind))
               != cfg.assume_nonwandering.end();
    };

    RotationSetOptions ropt;
    ropt.n = cfg.n;
    ropt.window = cfg.window;
    ropt.bins = cfg.bins;
    ropt.twist_tol = 1e-6;
    ropt.threads = cfg.threads;

    for (const auto &fam : families) {
        const auto est = rotation_set(fam.lift, cfg.nx, cfg.ny, ropt);

        ClaimRow c{"containment", fam.name, "contained", {}, est.containment.contained};
        c.observed = est.containment.contained ? "contained" : "violated";
        c.measured = {{"hull", {est.hull_lo, est.hull_hi}},
                      {"max_below", est.containment.max_below},
                      {"max_above", est.containment.max_above}};
        rows.push_back(c);

        const double err0 = std::abs(est.twist.rho0.value - fam.truth.rho0);
        const double err1 = std::abs(est.twist.rho1.value - fam.truth.rho1);
        ClaimRow t{"twist_interval_truth", fam.name, "within 1e-5", {}, err0 <= 1e-5 && err1 <= 1e-5};
        t.observed = t.pass ? "within 1e-5" : "off";
        t.measured = {{"rho0", est.twist.rho0.value}, {"rho1", est.twist.rho1.value}, {"truth_rho0", fam.truth.rho0},
                      {"truth_rho1", fam.truth.rho1}};
        rows.push_back(t);

        if (!fam.truth.rotation_set_is_interval) {
            // Transients decay like 1/n: 1e-3 at n = 1e5, scaled with the budget.
            const double near = 1e-3 * 1e5 / static_cast<double>(cfg.n);
            std::size_t hits = 0;
            for (const auto &s : est.samples) {
                for (double v : fam.truth.values) {
                    if (std::abs(s.value() - v) <= near) {
                        ++hits;
                        break;
                    }
                }
            }
            const double mass = static_cast<double>(hits) / static_cast<double>(est.samples.size());
            ClaimRow v{"rotation_set_truth", fam.name, "mass >= 0.99 near truth values", {}, mass >= 0.99};
            v.observed = v.pass ? v.expected : "mass < 0.99";
            v.measured = {{"mass", mass}, {"within", near}, {"values", fam.truth.values}};
            rows.push_back(v);
        }

        const bool nonwandering = fam.truth.non_wandering || assumed(fam);
        const bool degenerate = fam.truth.rho0 == fam.truth.rho1;
        if (nonwandering || degenerate) {
            const BoundaryTwist bt = boundary_twist_condition(fam.lift, 1e-5);
            ClaimRow b{nonwandering ? "separation_nonwandering" : "separation_degenerate", fam.name,
                       nonwandering ? "certified" : "undecided", bt.certified ? "certified" : "undecided", false};
            b.pass = b.expected == b.observed;
            b.measured = {{"rho0_hi", bt.interval.rho0.hi()}, {"rho1_lo", bt.interval.rho1.lo()}, {"tol", 1e-5}};
            rows.push_back(b);
        }
    }

    {
        const Family sh = build_family({FamilyKind::shear, {}, {{"phi", "identity"}}, {}});
        const auto c1 = trace_curve(sh.lift, detail::horizontal_seeds(0.2, 64), 100);
        const auto c2 = trace_curve(sh.lift, detail::horizontal_seeds(0.7, 64), 100);
        const double L = working_lipschitz_bound(check_twist(sh.lift, 64, 33, 0.0));
        const auto g1 = birkhoff_graph_check(sh.lift, c1, L, 1e-9);
        const auto g2 = birkhoff_graph_check(sh.lift, c2, L, 1e-9);
        const auto d = distinct_rotation_check(sh.lift, c1, c2, 1e-6);
        ClaimRow r{"distinct_curves", sh.name, "distinct graphs", {}, false};
        r.pass = g1.is_graph && g2.is_graph && d.verdict == Distinctness::distinct;
        r.observed = r.pass ? "distinct graphs" : (g1.is_graph && g2.is_graph ? to_string(d.verdict) : "not graphs");
        r.measured = {{"rho1", d.rho1.value}, {"rho2", d.rho2.value}, {"min_separation", d.min_separation}};
        rows.push_back(r);
    }

    {
        const Ellipse e(2.0, 1.0);
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> ux(0.0, e.perimeter());
        std::uniform_real_distribution<double> ut(0.1, std::numbers::pi - 0.1);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const BilliardState st{ux(rng), ut(rng)};
            worst = std::max(worst, twist_derivative_check(e, st, 1e-6).rel_residual);
        }
        ClaimRow r{"billiard_twist_derivative", "billiard", "rel residual <= 1e-4", {}, worst <= 1e-4};
        r.observed = r.pass ? r.expected : "rel residual > 1e-4";
        r.measured = {{"max_rel_residual", worst}, {"states", 100}, {"h", 1e-6}};
        rows.push_back(r);

        const TwistReport tr = check_twist(as_annulus_lift(e), 32, 32, 0.0, 1e-3, 1.0 - 1e-3);
        ClaimRow p{"billiard_twist_positive", "billiard", "min increment > 0", {}, tr.is_twist};
        p.observed = tr.is_twist ? p.expected : "min increment <= 0";
        p.measured = {{"min_increment", tr.min_increment}, {"grid", {32, 32}}};
        rows.push_back(p);
    }

    {
        const LockingInterval li
            = locking_interval([](double t) { return arnold_circle(t, 0.25); }, 1, 2, 0.3, 0.7, 1e-9);
        ClaimRow r{"mode_locking", "arnold(eps=0.25)", "positive width", {}, li.width() > 0.0};
        r.observed = r.pass ? r.expected : "zero width";
        r.measured = {{"t_lo", li.t_lo}, {"t_hi", li.t_hi}, {"width", li.width()}};
        rows.push_back(r);
    }
    return rows;
}

inline CommandOutput cmd_verify(const RunConfig &cfg)
{
    const auto rows = run_claims(cfg);
    Json j;
    j["seed"] = cfg.seed;
    j["grid"] = {{"nx", cfg.nx}, {"ny", cfg.ny}, {"n", cfg.n}};
    j["assume_nonwandering"] = cfg.assume_nonwandering;
    Json table = Json::array();
    std::size_t failed = 0;
    for (const auto &r : rows) {
        table.push_back(claim_json(r));
        failed += r.pass ? 0 : 1;
    }
    j["claims"] = table;
    j["passed"] = rows.size() - failed;
    j["failed"] = failed;
    j["all_pass"] = failed == 0;
    CommandOutput out{failed == 0 ? exit_code::ok : exit_code::claim_failed, to_json_text(j), {}, {}};
    if (failed != 0) {
        out.diagnostic = std::to_string(failed) + " claim(s) failed";
    }
    return out;
}

// ---- dispatch ---------------------------------------------------------------

inline const std::map<std::string, std::function<CommandOutput(const RunConfig &)>> &commands()
{
    static const std::map<std::string, std::function<CommandOutput(const RunConfig &)>> table{
        {"rotnum", cmd_rotnum},
        {"twist-interval", cmd_twist_interval},
        {"rotation-set", cmd_rotation_set},
        {"phase-portrait", cmd_phase_portrait},
        {"tongue", cmd_tongue},
        {"curves", cmd_curves},
        {"recurrence", cmd_recurrence},
        {"verify", cmd_verify},
    };
    return table;
}

// Per-command defaults, applied beneath file and flag values.
inline ConfigTable command_defaults(const std::string &command)
{
    if (command == "verify") {
        return {{"analysis", {{"nx", "16"}, {"ny", "16"}, {"n", "10000"}}}};
    }
    return {};
}

// Runs a command and maps library errors onto the exit-code contract.
inline CommandOutput run_command(const std::string &command, const RunConfig &cfg)
{
    const auto it = commands().find(command);
    if (it == commands().end()) {
        return {exit_code::config, {}, {}, "unknown command '" + command + "'"};
    }
    try {
        return it->second(cfg);
    }
    catch (const ConfigError &e) {
        return {exit_code::config, {}, {}, std::string("config error: ") + e.what()};
    }
    catch (const InvalidFamily &e) {
        return {exit_code::config, {}, {}, std::string("invalid family: ") + e.what()};
    }
    catch (const NotLocked &e) {
        return {exit_code::config, {}, {}, std::string("invalid family: ") + e.what()};
    }
    catch (const std::invalid_argument &e) {
        return {exit_code::config, {}, {}, std::string("invalid argument: ") + e.what()};
    }
    catch (const BudgetExceeded &e) {
        return {exit_code::budget, {}, {}, std::string("budget exceeded: ") + e.what()};
    }
    catch (const TongueMissed &e) {
        return {exit_code::tongue_missed, {}, {}, std::string("tongue missed: ") + e.what()};
    }
    catch (const Error &e) {
        return {exit_code::analysis, {}, {}, std::string("analysis failed: ") + e.what()};
    }
}

} // namespace twistlab
