#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "fnlab/rng.hpp"
#include "fnlab/scheme.hpp"

using namespace fnlab;

namespace {

std::shared_ptr<Grid> ball_grid(double h, double bw = 5.0) {
    auto dom = std::make_shared<Domain>(Domain::ball({0, 0}, 1.0));
    return build_grid(dom, h, bw);
}

int node_at(const Grid& g, Vec2 p) {
    for (int idx : g.interior())
        if (norm(g.point(idx) - p) < 1e-9) return idx;
    REQUIRE(false);
    return -1;
}

} // namespace

TEST_CASE("second differences are exact on quadratics") {
    auto grid = ball_grid(1.0 / 16);
    GridFunction u(grid);
    u.fill([](Vec2 p) { return norm2(p); });
    int center = node_at(*grid, {0, 0});
    for (LatticeDir w : {LatticeDir{1, 0}, LatticeDir{1, 1}, LatticeDir{2, 1}, LatticeDir{3, -2}})
        CHECK(second_difference(u, center, w) == doctest::Approx(2.0).epsilon(1e-12));

    GridFunction aff(grid);
    aff.fill([](Vec2 p) { return 0.3 + 1.7 * p.x - 0.4 * p.y; });
    for (LatticeDir w : {LatticeDir{1, 0}, LatticeDir{1, 2}})
        CHECK(second_difference(aff, center, w) == doctest::Approx(0.0).epsilon(1e-12));

    GridFunction xy(grid);
    xy.fill([](Vec2 p) { return p.x * p.y; });
    // directional second derivative along (1,1)/sqrt(2) of x*y is 1
    CHECK(second_difference(xy, center, {1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shortened arms reproduce quadratics against the boundary trace") {
    // band of one lattice step, so long arms exit it and get cut at the circle
    auto dom = std::make_shared<Domain>(Domain::ball({0, 0}, 1.0));
    auto grid = std::make_shared<Grid>(dom, 1.0 / 16, 1.2);
    GridFunction u(grid);
    auto f = [](Vec2 p) { return norm2(p); };
    u.fill(f);
    BoundaryData bd{f};
    int tested = 0;
    for (int idx : grid->interior()) {
        if (grid->signed_dist(idx) > -2.5 / 16.0) {
            int tgt = grid->neighbor(idx, 3, 1);
            if (tgt >= 0 && !grid->is_valid(tgt)) {
                CHECK(second_difference(u, idx, {3, 1}, &bd) == doctest::Approx(2.0).epsilon(1e-7));
                ++tested;
            }
        }
    }
    CHECK(tested > 0);
    // without boundary data the shortened arm is an error
    for (int idx : grid->interior()) {
        int tgt = grid->neighbor(idx, 3, 1);
        if (tgt >= 0 && !grid->is_valid(tgt)) {
            CHECK_THROWS_AS(second_difference(u, idx, {3, 1}), std::invalid_argument);
            break;
        }
    }
}

TEST_CASE("direction exiting the lattice is an error") {
    auto grid = ball_grid(1.0 / 8);
    GridFunction u(grid);
    u.fill([](Vec2) { return 0.0; });
    int center = node_at(*grid, {0, 0});
    CHECK_THROWS_AS(second_difference(u, center, {200, 0}), std::invalid_argument);
}

TEST_CASE("discrete gradient") {
    auto grid = ball_grid(1.0 / 16);
    GridFunction aff(grid);
    aff.fill([](Vec2 p) { return 2.0 - 0.7 * p.x + 0.25 * p.y; });
    for (int idx : grid->interior()) {
        Vec2 g = discrete_gradient(aff, idx);
        CHECK(g.x == doctest::Approx(-0.7).epsilon(1e-12));
        CHECK(g.y == doctest::Approx(0.25).epsilon(1e-12));
    }
    GridFunction sq(grid);
    sq.fill([](Vec2 p) { return norm2(p); });
    Vec2 g = discrete_gradient(sq, node_at(*grid, {0.5, 0}));
    CHECK(g.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.y == doctest::Approx(0.0).epsilon(1e-12));
    GridFunction sn(grid);
    sn.fill([](Vec2 p) { return std::sin(p.x); });
    Vec2 gs = discrete_gradient(sn, node_at(*grid, {0, 0}));
    CHECK(gs.x == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(gs.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("discrete Pucci operators on quadratic states") {
    auto grid = ball_grid(1.0 / 16);
    Stencil st = Stencil::standard(8);
    EllipticityPair e(1.0, 2.0);
    auto plus = OperatorSpec::pucci_plus_op(e);
    int center = node_at(*grid, {0, 0});

    GridFunction half(grid);
    half.fill([](Vec2 p) { return 0.5 * norm2(p); });
    CHECK(discrete_F(plus, half, center, st) == doctest::Approx(4.0).epsilon(1e-10));

    GridFunction aff(grid);
    aff.fill([](Vec2 p) { return 1.0 + p.x - 2.0 * p.y; });
    CHECK(discrete_F(plus, aff, center, st) == doctest::Approx(0.0).epsilon(1e-12));

    GridFunction saddle(grid);
    saddle.fill([](Vec2 p) { return 0.5 * (p.x * p.x - p.y * p.y); });
    // P+(diag(1,-1)) = 2-1 = 1, attained by the axis frame
    CHECK(discrete_F(plus, saddle, center, st) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frame refinement does not lose accuracy on a rotated Hessian") {
    auto grid = ball_grid(1.0 / 16);
    EllipticityPair e(1.0, 2.0);
    auto plus = OperatorSpec::pucci_plus_op(e);
    const double th = 30.0 * M_PI / 180.0;
    const double l1 = 3.0, l2 = -1.0;
    auto ufun = [&](Vec2 p) {
        double c = std::cos(th), s = std::sin(th);
        double a = c * p.x + s * p.y, b = -s * p.x + c * p.y;
        return 0.5 * (l1 * a * a + l2 * b * b);
    };
    GridFunction u(grid);
    u.fill(ufun);
    const double exact = e.Lambda * l1 + e.lambda * l2;
    int center = node_at(*grid, {0, 0});
    double prev = 1e300;
    for (int m : {2, 4, 8}) {
        double err = std::abs(discrete_F(plus, u, center, Stencil::standard(m)) - exact);
        CHECK(err <= prev + 1e-12);
        prev = err;
    }
    CHECK(prev <= 0.2);  // m=8 resolves a 30-degree frame to a few percent
}

TEST_CASE("residual on manufactured states") {
    auto grid = ball_grid(1.0 / 16, 2.25);
    SchemeParams params;
    params.eta = 1e-8;
    params.stencil = Stencil::standard(8);
    auto lap = OperatorSpec::laplacian();
    auto p0 = DegeneracyLaw::power(0.0);

    GridFunction u(grid);
    u.fill([](Vec2 p) { return (norm2(p) - 1.0) / 4.0 ; });
    GridFunction f(grid);
    f.fill([](Vec2) { return 1.0; });
    params.epsilon = 0.0;
    BoundaryData g0{[](Vec2) { return 0.0; }};
    GridFunction r = residual(p0, lap, u, f, {}, params, &g0);
    for (int idx : grid->interior()) CHECK(std::abs(r[idx]) <= 1e-10);

    GridFunction z(grid);
    z.fill([](Vec2) { return 0.0; });
    GridFunction f0(grid);
    f0.fill([](Vec2) { return 0.0; });
    params.epsilon = 0.7;
    GridFunction rz = residual(p0, lap, z, f0, {}, params, &g0);
    for (int idx : grid->interior()) CHECK(rz[idx] == 0.0);

    GridFunction ones(grid);
    ones.fill([](Vec2) { return 1.0; });
    BoundaryData g1{[](Vec2) { return 1.0; }};
    params.epsilon = 0.5;
    GridFunction r1 = residual(DegeneracyLaw::power(2.0), lap, ones, f0, {}, params, &g1);
    for (int idx : grid->interior()) CHECK(r1[idx] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("residual input validation") {
    auto grid = ball_grid(1.0 / 8, 2.25);
    GridFunction u(grid), f(grid);
    u.fill([](Vec2) { return 0.0; });
    f.fill([](Vec2) { return 0.0; });
    SchemeParams params;
    params.eta = 0.0;
    CHECK_THROWS_AS(residual(DegeneracyLaw::power(0.0), OperatorSpec::laplacian(), u, f, {}, params),
                    std::invalid_argument);
}

TEST_CASE("monotonicity of every built-in operator/law pairing (sampled)") {
    EllipticityPair e(1.0, 2.0);
    std::vector<OperatorSpec> ops = {
        OperatorSpec::pucci_plus_op(e), OperatorSpec::pucci_minus_op(e), OperatorSpec::laplacian(),
        OperatorSpec::inf_sup(e, {SymMatrix::diag({1.0, 2.0}), SymMatrix::diag({2.0, 1.0})}, true)};
    std::vector<DegeneracyLaw> laws = {DegeneracyLaw::power(0.0), DegeneracyLaw::power(2.0),
                                       DegeneracyLaw::power(-0.5)};
    SchemeParams params;
    params.eta = 1e-3;
    std::uint64_t seed = 900;
    for (const auto& op : ops)
        for (const auto& law : laws)
            for (double eps : {0.0, 0.1}) {
                params.epsilon = eps;
                auto rep = monotonicity_check(law, op, params, 150, seed++);
                CHECK(rep.violations == 0);
            }
}

TEST_CASE("translation equivariance on shifted lattices") {
    const double h = 1.0 / 8;
    Vec2 shift{3 * h, -2 * h};
    auto d0 = std::make_shared<Domain>(Domain::ball({0, 0}, 1.0));
    auto d1 = std::make_shared<Domain>(Domain::ball(shift, 1.0));
    auto g0 = build_grid(d0, h, 5.0);
    auto g1 = build_grid(d1, h, 5.0);
    REQUIRE(g0->interior().size() == g1->interior().size());
    auto ufun = [](Vec2 p) { return std::sin(2 * p.x) + 0.3 * p.y * p.y + 0.1 * p.x * p.y; };
    GridFunction u0(g0), u1(g1), f0(g0), f1(g1);
    u0.fill(ufun);
    u1.fill([&](Vec2 p) { return ufun(p - shift); });
    f0.fill([](Vec2 p) { return p.x + 2.0; });
    f1.fill([&](Vec2 p) { return (p.x - shift.x) + 2.0; });
    SchemeParams params;
    params.eta = 1e-6;
    params.epsilon = 0.01;
    auto law = DegeneracyLaw::power(2.0);
    auto op = OperatorSpec::pucci_plus_op(EllipticityPair(1.0, 2.0));
    BoundaryData b0{ufun};
    BoundaryData b1{[&](Vec2 p) { return ufun(p - shift); }};
    GridFunction r0 = residual(law, op, u0, f0, {}, params, &b0);
    GridFunction r1 = residual(law, op, u1, f1, {}, params, &b1);
    for (size_t k = 0; k < g0->interior().size(); ++k) {
        int i0 = g0->interior()[k];
        Vec2 p = g0->point(i0) + shift;
        bool found = false;
        for (size_t k1 = 0; k1 < g1->interior().size(); ++k1) {
            int i1 = g1->interior()[k1];
            if (norm(g1->point(i1) - p) < 1e-12) {
                CHECK(r0[i0] == doctest::Approx(r1[i1]).epsilon(1e-13));
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("compiled residual operator matches the functional path") {
    auto dom = std::make_shared<Domain>(Domain::ball({0.1, -0.2}, 1.0));
    auto grid = build_grid(dom, 1.0 / 12, 5.0);
    auto ffun = [](Vec2 p) { return 1.0 + 0.5 * p.x; };
    BoundaryData bd{[](Vec2 p) { return 0.2 * p.x * p.y; }};
    Rng rng(4242);
    SchemeParams params;
    params.eta = 1e-4;
    params.epsilon = 0.03;
    for (auto op : {OperatorSpec::pucci_plus_op(EllipticityPair(0.8, 2.0)),
                    OperatorSpec::pucci_minus_op(EllipticityPair(0.8, 2.0)),
                    OperatorSpec::laplacian()}) {
        for (auto law : {DegeneracyLaw::power(0.0), DegeneracyLaw::power(2.0),
                         DegeneracyLaw::power(-0.5)}) {
            ResidualOperator rop(grid, op, law, params.stencil, ffun, bd, Vec2{0.1, 0.0});
            GridFunction u(grid);
            u.fill([&](Vec2 p) { return std::cos(3 * p.x) * std::sin(2 * p.y); });
            for (int idx : grid->interior()) u[idx] += 0.01 * rng.uniform(-1, 1);
            GridFunction f(grid);
            f.fill(ffun);
            GridFunction r = residual(law, op, u, f, GradientShift{{0.1, 0.0}}, params, &bd);
            std::vector<double> res, coeff;
            rop.eval(u.values(), params.eta, params.epsilon, 2, res, coeff);
            const auto& interior = grid->interior();
            for (size_t k = 0; k < interior.size(); ++k)
                CHECK(res[k] == doctest::Approx(r[interior[k]]).epsilon(1e-12));
        }
    }
}

TEST_CASE("residual operator is thread-count invariant (bitwise)") {
    auto grid = ball_grid(1.0 / 16);
    auto law = DegeneracyLaw::power(2.0);
    auto op = OperatorSpec::pucci_plus_op(EllipticityPair(1.0, 2.0));
    BoundaryData bd{[](Vec2) { return 0.0; }};
    ResidualOperator rop(grid, op, law, Stencil::standard(8), [](Vec2) { return 1.0; }, bd);
    GridFunction u(grid);
    u.fill([](Vec2 p) { return std::sin(p.x + 2 * p.y); });
    std::vector<double> r1, r4, c1, c4;
    rop.eval(u.values(), 1e-6, 0.01, 1, r1, c1);
    rop.eval(u.values(), 1e-6, 0.01, 4, r4, c4);
    CHECK(r1 == r4);
    CHECK(c1 == c4);
}
