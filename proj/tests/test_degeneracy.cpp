#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fnlab/degeneracy.hpp"

using namespace fnlab;

namespace {
const Aabb kBox{{-1, -1}, {1, 1}};
}

TEST_CASE("phi_eval on the built-in laws") {
    CHECK(phi_eval(DegeneracyLaw::power(2.0), {0, 0}, 3.0) == doctest::Approx(9.0));
    auto dp = DegeneracyLaw::double_phase(1.0, 2.0, [](Vec2) { return 1.0; });
    CHECK(phi_eval(dp, {0.3, -0.2}, 2.0) == doctest::Approx(6.0));
    // normalization nu0 <= Phi(x,1) <= nu1 with the defaults nu0 = nu1 = 1
    CHECK(phi_eval(DegeneracyLaw::power(0.7), {0.5, 0.5}, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("phi_eval input validation and singular endpoint") {
    auto law = DegeneracyLaw::power(-0.5);
    CHECK_THROWS_AS(phi_eval(law, {0, 0}, -1.0), std::invalid_argument);
    CHECK(std::isinf(phi_eval(law, {0, 0}, 0.0)));  // conceptual +inf, never hit by the scheme
    CHECK(phi_eval(DegeneracyLaw::power(2.0), {0, 0}, 0.0) == 0.0);
}

TEST_CASE("law constructor validation") {
    CHECK_THROWS_AS(DegeneracyLaw::power(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(DegeneracyLaw::double_phase(2.0, 1.0, [](Vec2) { return 1.0; }),
                    std::invalid_argument);
}

TEST_CASE("check_a2 accepts exactly-monotone laws") {
    CHECK(check_a2(DegeneracyLaw::power(2.0), kBox, 20, 500, 1).monotonicity_violations == 0);
    CHECK(check_a2(DegeneracyLaw::power(-0.5), kBox, 20, 500, 2).monotonicity_violations == 0);
    auto dp = DegeneracyLaw::double_phase(1.0, 2.0, [](Vec2 p) { return 1.0 + 0.5 * p.x * p.x; },
                                          1.5);
    auto rep = check_a2(dp, kBox, 20, 500, 3);
    CHECK(rep.monotonicity_violations == 0);
    CHECK(rep.normalization_violations == 0);
    auto ve = DegeneracyLaw::variable_exponent([](Vec2 p) { return 1.0 + 0.5 * p.x; }, kBox);
    CHECK(check_a2(ve, kBox, 20, 500, 4).monotonicity_violations == 0);
}

TEST_CASE("check_a2 flags a misdeclared upper index") {
    // t^2 with s declared 1: t^2/t = t is increasing, not almost non-increasing
    auto bad = DegeneracyLaw::custom([](Vec2, double t) { return t * t; }, 1.0, 1.0, 1.0, 1.0, 1.0,
                                     "misdeclared");
    CHECK(check_a2(bad, kBox, 5, 200, 5).monotonicity_violations > 0);
}

TEST_CASE("transform_singular_to_degenerate") {
    auto t1 = transform_singular_to_degenerate(DegeneracyLaw::power(-0.5));
    CHECK(t1.law.i() == 0.0);
    CHECK(t1.law.s() == 0.0);
    CHECK(t1.f_gradient_exponent == doctest::Approx(0.5));
    for (double t : {0.2, 1.0, 7.0}) CHECK(t1.law.eval({0, 0}, t) == doctest::Approx(1.0).epsilon(1e-12));

    auto t2 = transform_singular_to_degenerate(DegeneracyLaw::power(0.0));
    CHECK(t2.f_gradient_exponent == 0.0);
    CHECK(t2.law.eval({0, 0}, 3.0) == doctest::Approx(1.0));

    auto dp = DegeneracyLaw::double_phase(-0.5, 0.5, [](Vec2) { return 2.0; }, 2.0);
    auto t3 = transform_singular_to_degenerate(dp);
    CHECK(t3.law.i() == 0.0);
    CHECK(t3.law.s() == doctest::Approx(1.0));
    for (double t : {0.1, 1.0, 4.0})
        CHECK(t3.law.eval({0.2, 0.1}, t) == doctest::Approx(1.0 + 2.0 * t).epsilon(1e-10));
    // the transformed law passes the index checks with i = 0
    CHECK(check_a2(t3.law, kBox, 10, 300, 6).monotonicity_violations == 0);
}

TEST_CASE("rescale_smallness") {
    auto pw = rescale_smallness(DegeneracyLaw::power(1.7), {0.3, 0.1}, 0.25, 4.0);
    for (double t : {0.3, 1.0, 5.0})
        CHECK(pw.eval({0.8, -0.3}, t) == doctest::Approx(std::pow(t, 1.7)).epsilon(1e-12));
    auto dp = DegeneracyLaw::double_phase(1.0, 2.0, [](Vec2) { return 1.0; });
    auto r = rescale_smallness(dp, {0, 0}, 0.5, 1.0);  // K/r = 2
    CHECK(r.eval({0.4, 0.4}, 1.0) == doctest::Approx(1.0));
    CHECK(r.eval({0.4, 0.4}, 2.0) == doctest::Approx(20.0 / 6.0));
    CHECK(check_a2(r, kBox, 10, 300, 7).monotonicity_violations == 0);
    CHECK_THROWS_AS(rescale_smallness(dp, {0, 0}, 1.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(rescale_smallness(dp, {0, 0}, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("rescale_iterate") {
    auto dp = DegeneracyLaw::double_phase(0.5, 2.0, [](Vec2 p) { return 1.0 + p.x * p.x; }, 2.0);
    auto l0 = rescale_iterate(dp, 0.25, 0, 0.5, {0, 0});
    CHECK(l0.eval({0.3, 0.3}, 1.0) == doctest::Approx(1.0));  // k=0 is normalization only
    auto l3 = rescale_iterate(dp, 0.25, 3, 0.5, {0.1, 0.1});
    CHECK(l3.eval({-0.4, 0.2}, 1.0) == doctest::Approx(1.0));
    CHECK(l3.i() == dp.i());
    CHECK(l3.s() == dp.s());
    CHECK(check_a2(l3, kBox, 10, 300, 8).monotonicity_violations == 0);

    // power laws are fixed points, so iterating composes trivially
    auto pw = DegeneracyLaw::power(2.0);
    auto once = rescale_iterate(rescale_iterate(pw, 0.3, 1, 0.4, {0, 0}), 0.3, 2, 0.4, {0, 0});
    auto direct = rescale_iterate(pw, 0.3, 3, 0.4, {0, 0});
    for (double t : {0.2, 1.0, 3.0})
        CHECK(once.eval({0.5, 0}, t) == doctest::Approx(direct.eval({0.5, 0}, t)).epsilon(1e-13));

    CHECK_THROWS_AS(rescale_iterate(dp, 0.7, 1, 0.5, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(rescale_iterate(dp, 0.25, -1, 0.5, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(rescale_iterate(dp, 0.25, 1, 1.5, {0, 0}), std::invalid_argument);
}
