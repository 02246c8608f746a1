#include <catch_amalgamated.hpp>

#include <cstdlib>

#include "twistlab/cli.hpp"

using namespace twistlab;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

RunConfig config_from(const std::string &text) { return make_run_config(parse_config_text(text)); }

Json parse(const CommandOutput &out) { return Json::parse(out.main); }

} // namespace

TEST_CASE("config parsing is strict")
{
    const auto t = parse_config_text("# comment\n[family]\nfamily = arnold ; trailing\nomega=0.5\n\n[analysis]\ntol = 1e-7\n");
    CHECK(t.at("family").at("family") == "arnold");
    CHECK(t.at("family").at("omega") == "0.5");
    CHECK(t.at("analysis").at("tol") == "1e-7");

    CHECK_THROWS_AS(parse_config_text("[family]\nomgea = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[plots]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("tol = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[analysis]\ntol 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[analysis]\ntol = 1\ntol = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[analysis\n"), ConfigError);
}

TEST_CASE("config values are validated")
{
    CHECK_THROWS_AS(config_from("[analysis]\ntol = 0\n"), ConfigError);
    CHECK_THROWS_AS(config_from("[analysis]\ntol = abc\n"), ConfigError);
    CHECK_THROWS_AS(config_from("[analysis]\nn = 0\n"), ConfigError);
    CHECK_THROWS_AS(config_from("[analysis]\nboundary = 2\n"), ConfigError);
    CHECK_THROWS_AS(config_from("[analysis]\nt_lo = 0.8\nt_hi = 0.2\n"), ConfigError);
    CHECK_THROWS_AS(config_from("[family]\nfamily = nonesuch\n"), ConfigError);
    CHECK_THROWS_AS(config_from("[family]\nomega = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(config_from("[analysis]\nassume_nonwandering = shear, bogus\n"), ConfigError);

    const auto cfg = config_from("[family]\nfamily = shear\nphi = square\n[analysis]\nnx = 7\nseed = 42\n"
                                 "assume_nonwandering = locked, eye\n[output]\nout = r.json\n");
    REQUIRE(cfg.family);
    CHECK(cfg.family->kind == FamilyKind::shear);
    CHECK(cfg.family->option("phi", "") == "square");
    CHECK(cfg.nx == 7);
    CHECK(cfg.seed == 42);
    CHECK(cfg.assume_nonwandering == std::vector<std::string>{"locked", "eye"});
    CHECK(cfg.out == "r.json");
}

TEST_CASE("flags override file values")
{
    const auto file = parse_config_text("[family]\nfamily = rigid\nalpha = 0.25\n");
    const ConfigTable flags{{"family", {{"alpha", "0.5"}}}};
    const auto cfg = make_run_config(merge_config(file, flags));
    CHECK(cfg.family->param("alpha", 0.0) == 0.5);
    CHECK(section_of("alpha") == "family");
    CHECK(section_of("tol") == "analysis");
    CHECK_THROWS_AS(section_of("nope"), ConfigError);
}

TEST_CASE("threads fall back to the environment")
{
    ::setenv("TWISTLAB_THREADS", "3", 1);
    CHECK(config_from("").threads == 3);
    CHECK(config_from("[analysis]\nthreads = 1\n").threads == 1);
    ::setenv("TWISTLAB_THREADS", "many", 1);
    CHECK_THROWS_AS(config_from(""), ConfigError);
    ::unsetenv("TWISTLAB_THREADS");
    CHECK(config_from("").threads == 0);
}

TEST_CASE("json emitter writes 17 significant digits")
{
    Json j;
    j["a"] = 0.1;
    j["b"] = 3;
    j["c"] = {1.5, 2.0};
    j["d"] = "x";
    j["e"] = true;
    const std::string text = to_json_text(j);
    CHECK_THAT(text, ContainsSubstring("\"a\": 0.10000000000000001"));
    CHECK_THAT(text, ContainsSubstring("\"b\": 3"));
    CHECK_THAT(text, ContainsSubstring("[1.5, 2]"));
    CHECK(text.find('\r') == std::string::npos);
    CHECK(Json::parse(text)["a"].get<double>() == 0.1);
    CHECK(format_real(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("csv writer")
{
    CsvWriter w({"id", "x"});
    w.row(1, 0.25);
    w.row(std::size_t{2}, 1e-20);
    CHECK(w.text() == "id,x\n1,0.25\n2,9.9999999999999995e-21\n");
    CHECK(w.rows() == 2);
    CHECK_THROWS_AS(w.row(1), std::invalid_argument);
}

TEST_CASE("rotnum")
{
    const auto r = parse(run_command("rotnum", config_from("[family]\nfamily = rigid\nalpha = 0.3\n")));
    CHECK_THAT(r["value"].get<double>(), WithinAbs(0.3, 1e-6));
    CHECK(r.contains("halfwidth"));
    CHECK(r.contains("iterations"));
    CHECK(r.contains("seed_x"));

    const auto a = parse(run_command("rotnum", config_from("[family]\nfamily = arnold\nomega = 0.5\neps = 0.25\n")));
    CHECK_THAT(a["value"].get<double>(), WithinAbs(0.5, 1e-6));

    const auto b = parse(run_command(
        "rotnum", config_from("[family]\nfamily = billiard\na = 2\nb = 1\n[analysis]\nboundary = 0\n")));
    CHECK_THAT(b["value"].get<double>(), WithinAbs(0.0, 1e-6));

    CHECK(run_command("rotnum", config_from("[family]\nfamily = billiard\n")).status == exit_code::config);
    CHECK(run_command("rotnum", config_from("")).status == exit_code::config);
    CHECK(run_command("rotnum", config_from("[family]\nfamily = rigid\n[analysis]\nboundary = 1\n")).status
          == exit_code::config);
    const auto budget = run_command(
        "rotnum", config_from("[family]\nfamily = rigid\nalpha = 0.61803398875\n[analysis]\ntol = 1e-9\n"
                              "max_iterations = 100\n"));
    CHECK(budget.status == exit_code::budget);
    CHECK_FALSE(budget.diagnostic.empty());
}

TEST_CASE("twist-interval verdicts")
{
    const auto s = parse(run_command("twist-interval", config_from("[family]\nfamily = shear\n")));
    CHECK(s["separated"] == true);
    CHECK_THAT(s["rho0"]["value"].get<double>(), WithinAbs(0.0, 1e-6));
    CHECK_THAT(s["rho1"]["value"].get<double>(), WithinAbs(1.0, 1e-6));

    for (const char *fam : {"locked", "eye"}) {
        const auto out = run_command("twist-interval", config_from(std::string("[family]\nfamily = ") + fam + "\n"));
        CHECK(out.status == exit_code::ok);
        CHECK(parse(out)["separated"] == "undecided");
    }
    CHECK(run_command("twist-interval", config_from("[family]\nfamily = rigid\n")).status == exit_code::config);
}

TEST_CASE("rotation-set output")
{
    const auto out = run_command(
        "rotation-set", config_from("[family]\nfamily = shear\n[analysis]\nnx = 4\nny = 5\nn = 1000\nbins = 4\n"));
    REQUIRE(out.status == exit_code::ok);
    const auto j = parse(out);
    CHECK_THAT(j["hull"][0].get<double>(), WithinAbs(0.0, 1e-12));
    CHECK_THAT(j["hull"][1].get<double>(), WithinAbs(1.0, 1e-12));
    CHECK(j["containment"]["verdict"] == "contained");
    CHECK(j["samples"] == 20);
    CHECK(out.csv.rfind("x,y,lower,upper,n\n", 0) == 0);
    CHECK(std::count(out.csv.begin(), out.csv.end(), '\n') == 21);

    const auto fl = parse(run_command(
        "rotation-set", config_from("[family]\nfamily = float\npsi = square\n[analysis]\nnx = 4\nny = 5\nn = 20000\n")));
    const auto counts = fl["histogram"]["counts"];
    CHECK(counts.front().get<int>() + counts.back().get<int>() == 20);
}

TEST_CASE("phase-portrait rows")
{
    const auto out = run_command(
        "phase-portrait", config_from("[family]\nfamily = billiard\n[analysis]\nseeds = 40\nsteps = 2000\n"));
    REQUIRE(out.status == exit_code::ok);
    CHECK(std::count(out.main.begin(), out.main.end(), '\n') == 1 + 40 * 2001);

    // Circle table and shear: every orbit keeps its y.
    for (const char *cfg : {"[family]\nfamily = billiard\na = 1\nb = 1\n[analysis]\nseeds = 5\nsteps = 50\n",
                            "[family]\nfamily = shear\n[analysis]\nseeds = 5\nsteps = 50\n"}) {
        const auto pp = run_command("phase-portrait", config_from(cfg));
        std::istringstream in(pp.main);
        std::string line;
        std::getline(in, line);
        std::map<int, double> first_y;
        while (std::getline(in, line)) {
            int id = 0;
            int step = 0;
            double x = 0.0;
            double y = 0.0;
            REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &id, &step, &x, &y) == 4);
            if (step == 0) {
                first_y[id] = y;
            }
            CHECK_THAT(y, WithinAbs(first_y[id], 1e-10));
        }
    }
}

TEST_CASE("tongue")
{
    const auto j = parse(run_command("tongue", config_from("[family]\nfamily = arnold\neps = 0.25\n")));
    CHECK(j["p"] == 1);
    CHECK(j["q"] == 2);
    CHECK(j["t_lo"].get<double>() < 0.5);
    CHECK(j["t_hi"].get<double>() > 0.5);

    const auto r = parse(run_command("tongue", config_from("[family]\nfamily = arnold\neps = 0\n[analysis]\ntol = 1e-9\n")));
    CHECK_THAT(r["t_lo"].get<double>(), WithinAbs(0.5, 1e-9));
    CHECK_THAT(r["t_hi"].get<double>(), WithinAbs(0.5, 1e-9));

    const auto miss = run_command("tongue", config_from("[family]\nfamily = arnold\n[analysis]\nt_lo = 0.6\nt_hi = 0.7\n"));
    CHECK(miss.status == exit_code::tongue_missed);
    CHECK(run_command("tongue", config_from("[family]\nfamily = shear\n")).status == exit_code::config);
}

TEST_CASE("curves and recurrence commands")
{
    const auto c = run_command(
        "curves", config_from("[family]\nfamily = shear\n[analysis]\ncurve_seeds = 64\ncurve_n = 100\n"));
    REQUIRE(c.status == exit_code::ok);
    CHECK(parse(c)["verdict"] == "distinct");

    const auto sparse = run_command("curves", config_from("[family]\nfamily = shear\n"));
    CHECK(sparse.status == exit_code::analysis);

    const auto r = run_command("recurrence", config_from("[family]\nfamily = shear\n[analysis]\nnx = 4\nny = 3\n"
                                                         "max_iter = 200\nradius = 0.01\n"));
    REQUIRE(r.status == exit_code::ok);
    CHECK(parse(r)["returned"] == 12);
    CHECK(r.csv.rfind("x,y,returned,first_return\n", 0) == 0);
}

TEST_CASE("verify: claims pass, negative control fails, output is deterministic")
{
    auto cfg = make_run_config(command_defaults("verify"));
    cfg.nx = 6;
    cfg.ny = 6;
    const auto a = run_command("verify", cfg);
    CHECK(a.status == exit_code::ok);
    const auto j = parse(a);
    CHECK(j["all_pass"] == true);
    CHECK(j["failed"] == 0);
    bool saw_twist_row = false;
    for (const auto &row : j["claims"]) {
        if (row["claim"] == "billiard_twist_derivative") {
            saw_twist_row = true;
            CHECK(row["measured"]["max_rel_residual"].get<double>() <= 1e-4);
        }
    }
    CHECK(saw_twist_row);

    const auto b = run_command("verify", cfg);
    CHECK(a.main == b.main);

    cfg.assume_nonwandering = {"locked"};
    const auto neg = run_command("verify", cfg);
    CHECK(neg.status == exit_code::claim_failed);
    CHECK(parse(neg)["failed"].get<int>() >= 1);

    CHECK(run_command("nonesuch", cfg).status == exit_code::config);
}
