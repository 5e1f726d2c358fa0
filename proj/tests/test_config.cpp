#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fnlab/config.hpp"
#include "fnlab/experiments.hpp"
#include "fnlab/expr.hpp"

using namespace fnlab;

TEST_CASE("expression parser values and precedence") {
    CHECK(Expr::parse("1 + 2*3")({0, 0}) == doctest::Approx(7.0));
    CHECK(Expr::parse("(1+2)*3")({0, 0}) == doctest::Approx(9.0));
    CHECK(Expr::parse("2^3^2")({0, 0}) == doctest::Approx(512.0));  // right associative
    CHECK(Expr::parse("-x^2")({2, 0}) == doctest::Approx(-4.0));
    CHECK(Expr::parse("x - y/2")({1, 4}) == doctest::Approx(-1.0));
    CHECK(Expr::parse("abs(-3) + sqrt(16)")({0, 0}) == doctest::Approx(7.0));
    CHECK(Expr::parse("min(x, y) + max(x, y)")({2, 5}) == doctest::Approx(7.0));
    CHECK(Expr::parse("norm(x)")({3, 4}) == doctest::Approx(5.0));
    CHECK(Expr::parse("norm(x)^(4/3)")({0.5, 0}) == doctest::Approx(std::pow(0.5, 4.0 / 3.0)));
    CHECK(Expr::parse("pi")({0, 0}) == doctest::Approx(M_PI));
}

TEST_CASE("expression parser errors carry positions") {
    CHECK_THROWS_AS(Expr::parse("1 +"), std::invalid_argument);
    CHECK_THROWS_AS(Expr::parse("foo(2)"), std::invalid_argument);
    CHECK_THROWS_AS(Expr::parse("norm(y)"), std::invalid_argument);
    CHECK_THROWS_AS(Expr::parse("min(1)"), std::invalid_argument);
    CHECK_THROWS_AS(Expr::parse("1 2"), std::invalid_argument);
}

namespace {

const char* kGood = R"(
# comment
[problem]
domain   = ball 0 0 1
operator = pucci+
lambda   = 1
Lambda   = 2
law      = power 2
f        = 1 + x
g        = norm(x)^2
beta_g   = 0.7

[grid]
h = 1/16 1/32

[solve]
eps_schedule = 1e-1 1e-2
threads      = 2

[experiments]
run = solve assumptions

[output]
dir = /tmp/fnlab_cfg_test
)";

} // namespace

TEST_CASE("config parsing round trip") {
    ConfigFile cf = ConfigFile::parse_string(kGood);
    CHECK(cf.number("problem", "Lambda") == 2.0);
    CHECK(cf.numbers("grid", "h") == std::vector<double>{1.0 / 16, 1.0 / 32});
    ExperimentConfig ec = ExperimentConfig::from_config(cf, "good");
    CHECK(ec.problem.dom->kind() == DomainKind::Ball);
    CHECK(ec.problem.op.kind() == OperatorKind::PucciPlus);
    CHECK(ec.problem.law.i() == 2.0);
    CHECK(ec.problem.f({1, 0}) == doctest::Approx(2.0));
    CHECK(ec.problem.g.g({3, 4}) == doctest::Approx(25.0));
    CHECK(ec.beta_g == 0.7);
    CHECK(ec.solve.eps_schedule.size() == 2);
    CHECK(ec.solve.threads == 2);
    CHECK(ec.experiments == std::vector<std::string>{"solve", "assumptions"});
}

TEST_CASE("config errors carry line numbers") {
    try {
        ConfigFile::parse_string("[problem]\nbad line without equals\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(ConfigFile::parse_string("key = 1\n"), ConfigError);   // outside section
    CHECK_THROWS_AS(ConfigFile::parse_string("[sec\nx = 1\n"), ConfigError);
    ConfigFile cf = ConfigFile::parse_string("[grid]\nh = nonsense\n");
    CHECK_THROWS_AS(cf.numbers("grid", "h"), ConfigError);
    // unknown experiment name
    std::string bad = std::string(kGood) + "\n[experiments]\nrun = solve bogus\n";
    // (second [experiments] section replaces the key)
    ConfigFile cf2 = ConfigFile::parse_string(bad);
    CHECK_THROWS_AS(ExperimentConfig::from_config(cf2, "bad"), ConfigError);
}

TEST_CASE("bundled suites parse and list") {
    std::string dir = "suites";
    if (!std::filesystem::is_directory(dir)) dir = "../suites";
    REQUIRE(std::filesystem::is_directory(dir));
    auto suites = list_suites(dir);
    CHECK(suites.size() >= 6);
    for (const auto& [name, desc] : suites) {
        CAPTURE(name);
        CHECK(!desc.empty());
        CHECK_NOTHROW(ExperimentConfig::load(dir + "/" + name));
    }
    CHECK(list_suites("/nonexistent_dir_xyz").empty());
}

TEST_CASE("run_experiments exit codes") {
    // grid too coarse for the ball condition: input error -> 2
    ConfigFile cf = ConfigFile::parse_string(R"(
[problem]
domain   = ball 0 0 1
operator = laplace
law      = power 0
f        = 1
g        = 0
[grid]
h = 0.3
[experiments]
run = solve
[output]
dir = /tmp/fnlab_exit2
)");
    RunResult r2 = run_experiments(ExperimentConfig::from_config(cf, "coarse"));
    CHECK(r2.exit_code == 2);

    // non-convergence: 3
    ConfigFile cf3 = ConfigFile::parse_string(R"(
[problem]
domain   = ball 0 0 1
operator = laplace
law      = power 0
f        = 1
g        = 0
[grid]
h = 1/8
[solve]
max_iters = 4
[experiments]
run = solve
[output]
dir = /tmp/fnlab_exit3
)");
    RunResult r3 = run_experiments(ExperimentConfig::from_config(cf3, "stall"));
    CHECK(r3.exit_code == 3);

    // verification failure: 1 (impossibly tight error bound)
    ConfigFile cf1 = ConfigFile::parse_string(R"(
[problem]
domain   = ball 0 0 1
operator = laplace
law      = power 0
f        = 1
g        = 0
[grid]
h = 1/8
[experiments]
run = solve
[verify]
exact_u     = 0
linf_factor = 1e-9
[output]
dir = /tmp/fnlab_exit1
)");
    RunResult r1 = run_experiments(ExperimentConfig::from_config(cf1, "tight"));
    CHECK(r1.exit_code == 1);

    // clean run: 0, artifacts written
    ConfigFile cf0 = ConfigFile::parse_string(R"(
[problem]
domain   = ball 0 0 1
operator = laplace
law      = power 0
f        = 1
g        = 0
[grid]
h = 1/8
[experiments]
run = solve
[verify]
exact_u     = (norm(x)^2 - 1)/4
linf_factor = 5
[output]
dir = /tmp/fnlab_exit0
)");
    RunResult r0 = run_experiments(ExperimentConfig::from_config(cf0, "clean"));
    CHECK(r0.exit_code == 0);
    CHECK(std::filesystem::exists("/tmp/fnlab_exit0/solution.csv"));
    CHECK(std::filesystem::exists("/tmp/fnlab_exit0/report.csv"));
    CHECK(std::filesystem::exists("/tmp/fnlab_exit0/summary.txt"));
}

TEST_CASE("reruns byte-reproduce the artifacts across thread counts") {
    ConfigFile cf = ConfigFile::parse_string(R"(
[problem]
domain   = ball 0 0 1
operator = laplace
law      = power 0
f        = 1
g        = 0
[grid]
h = 1/8
[experiments]
run = solve abp comparison
[output]
dir = /tmp/fnlab_det_a
)");
    ExperimentConfig ec = ExperimentConfig::from_config(cf, "det");
    RunOverrides o1;
    o1.out_dir = "/tmp/fnlab_det_a";
    o1.threads = 1;
    RunOverrides o2;
    o2.out_dir = "/tmp/fnlab_det_b";
    o2.threads = 4;
    CHECK(run_experiments(ec, o1).exit_code == 0);
    CHECK(run_experiments(ec, o2).exit_code == 0);
    for (const char* f : {"solution.csv", "report.csv", "summary.txt"}) {
        std::ifstream a(std::string("/tmp/fnlab_det_a/") + f), b(std::string("/tmp/fnlab_det_b/") + f);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
        CHECK(!sa.empty());
    }
}
