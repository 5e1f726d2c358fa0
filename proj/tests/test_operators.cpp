#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fnlab/operators.hpp"
#include "fnlab/rng.hpp"

using namespace fnlab;

namespace {

SymMatrix random_sym(Rng& rng, int n, double amp = 2.0) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, rng.uniform(-amp, amp));
    return m;
}

SymMatrix random_psd(Rng& rng, int n, double amp = 2.0) {
    EigResult fr = eig_sym_full(random_sym(rng, n));
    SymMatrix m(n);
    std::vector<double> d(n);
    for (int k = 0; k < n; ++k) d[k] = rng.uniform(0.0, amp);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0;
            for (int k = 0; k < n; ++k) s += fr.vectors[i * n + k] * d[k] * fr.vectors[j * n + k];
            m.set(i, j, s);
        }
    return m;
}

double reconstruction_error(const SymMatrix& m) {
    EigResult r = eig_sym_full(m);
    const int n = m.n();
    double worst = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int k = 0; k < n; ++k)
                s += r.vectors[i * n + k] * r.values[k] * r.vectors[j * n + k];
            worst = std::max(worst, std::abs(s - m(i, j)));
        }
    return worst;
}

} // namespace

TEST_CASE("eig_sym on fixed matrices") {
    CHECK(eig_sym(SymMatrix::diag({3.0, -1.0})) == std::vector<double>{-1.0, 3.0});
    CHECK(eig_sym(SymMatrix(2)) == std::vector<double>{0.0, 0.0});
    SymMatrix offdiag(2);
    offdiag.set(0, 1, 1.0);
    auto ev = eig_sym(offdiag);  // characteristic polynomial l^2 - 1
    CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eig_sym ascending order and reconstruction") {
    Rng rng(101);
    for (int n : {2, 3, 4}) {
        for (int it = 0; it < 200; ++it) {
            SymMatrix m = random_sym(rng, n);
            auto ev = eig_sym(m);
            for (size_t k = 1; k < ev.size(); ++k) CHECK(ev[k] >= ev[k - 1]);
            CHECK(reconstruction_error(m) <= 1e-12 * (1.0 + m.frob_norm()));
        }
    }
}

TEST_CASE("eig_sym rejects non-finite input") {
    SymMatrix m(2);
    m.set(0, 0, std::nan(""));
    CHECK_THROWS_AS(eig_sym(m), std::invalid_argument);
}

TEST_CASE("ellipticity pair validation") {
    CHECK_THROWS_AS(EllipticityPair(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(EllipticityPair(2.0, 1.0), std::invalid_argument);
    CHECK_NOTHROW(EllipticityPair(1.0, 1.0));
}

TEST_CASE("pucci operators on fixed matrices") {
    EllipticityPair e(1.0, 2.0);
    CHECK(pucci_plus(SymMatrix::diag({1.0, -1.0}), e) == doctest::Approx(1.0));
    CHECK(pucci_plus(SymMatrix(2), e) == 0.0);
    CHECK(pucci_plus(SymMatrix::identity(2), e) == doctest::Approx(4.0));
    CHECK(pucci_minus(SymMatrix::diag({1.0, -1.0}), e) == doctest::Approx(-1.0));
    CHECK(pucci_minus(SymMatrix(2), e) == 0.0);
    CHECK(pucci_minus(SymMatrix::identity(2).scaled(-1.0), e) == doctest::Approx(-4.0));
}

TEST_CASE("pucci identities on random matrices") {
    Rng rng(202);
    EllipticityPair e(0.7, 2.5);
    for (int n : {2, 3}) {
        for (int it = 0; it < 2000; ++it) {
            SymMatrix m = random_sym(rng, n);
            SymMatrix w = random_sym(rng, n);
            double pp = pucci_plus(m, e), pm = pucci_minus(m, e);
            CHECK(pm <= pp + 1e-12);
            CHECK(std::abs(pucci_plus(-m, e) + pm) <= 1e-12 * (1.0 + std::abs(pm)));
            // sub/superadditivity
            SymMatrix s = m + w;
            CHECK(pucci_plus(s, e) <=
                  pp + pucci_plus(w, e) + 1e-11 * (1.0 + std::abs(pp) + std::abs(pucci_plus(w, e))));
            CHECK(pucci_minus(s, e) >=
                  pm + pucci_minus(w, e) - 1e-11 * (1.0 + std::abs(pm) + std::abs(pucci_minus(w, e))));
            // exact trace weights on N >= 0
            SymMatrix psd = random_psd(rng, n);
            CHECK(pucci_minus(psd, e) == doctest::Approx(e.lambda * psd.trace()).epsilon(1e-12));
            CHECK(pucci_plus(psd, e) == doctest::Approx(e.Lambda * psd.trace()).epsilon(1e-12));
        }
    }
}

TEST_CASE("lambda == Lambda collapses to the scaled trace") {
    Rng rng(303);
    EllipticityPair e(1.3, 1.3);
    for (int it = 0; it < 200; ++it) {
        SymMatrix m = random_sym(rng, 2);
        CHECK(pucci_plus(m, e) == doctest::Approx(1.3 * m.trace()).epsilon(1e-12));
        CHECK(pucci_minus(m, e) == doctest::Approx(1.3 * m.trace()).epsilon(1e-12));
    }
}

TEST_CASE("apply_operator dispatch") {
    EllipticityPair e(1.0, 2.0);
    auto lt = OperatorSpec::linear_trace(EllipticityPair(1.0, 1.0),
                                         [](Vec2) { return SymMatrix::identity(2); });
    CHECK(apply_operator(lt, SymMatrix::diag({2.0, 3.0})) == doctest::Approx(5.0));

    auto pp = OperatorSpec::pucci_plus_op(e);
    SymMatrix m = SymMatrix::diag({1.0, -1.0});
    CHECK(apply_operator(pp, m) == doctest::Approx(pucci_plus(m, e)));

    auto is = OperatorSpec::inf_sup(e, {SymMatrix::identity(2), SymMatrix::identity(2).scaled(2.0)},
                                    true);
    CHECK(apply_operator(is, SymMatrix::diag({1.0, 1.0})) == doctest::Approx(4.0));
    auto ii = OperatorSpec::inf_sup(e, {SymMatrix::identity(2), SymMatrix::identity(2).scaled(2.0)},
                                    false);
    CHECK(apply_operator(ii, SymMatrix::diag({1.0, 1.0})) == doctest::Approx(2.0));
}

TEST_CASE("check_uniform_ellipticity accepts consistent specs") {
    EllipticityPair e(1.0, 2.0);
    CHECK(check_uniform_ellipticity(OperatorSpec::pucci_plus_op(e), 1000, 7).violations == 0);
    CHECK(check_uniform_ellipticity(OperatorSpec::pucci_minus_op(e), 1000, 8).violations == 0);
    CHECK(check_uniform_ellipticity(OperatorSpec::laplacian(), 1000, 9).violations == 0);
    auto is = OperatorSpec::inf_sup(e, {SymMatrix::identity(2), SymMatrix::identity(2).scaled(2.0)},
                                    true);
    CHECK(check_uniform_ellipticity(is, 1000, 10).violations == 0);
}

TEST_CASE("check_uniform_ellipticity flags a misdeclared trace operator") {
    // tr(diag(1,3) M) violates the upper bound for N = diag(0,1) under (1,2)
    auto bad = OperatorSpec::linear_trace(EllipticityPair(1.0, 2.0),
                                          [](Vec2) { return SymMatrix::diag({1.0, 3.0}); });
    CHECK(check_uniform_ellipticity(bad, 1000, 11).violations >= 1);
}

TEST_CASE("check_uniform_ellipticity input validation") {
    CHECK_THROWS_AS(check_uniform_ellipticity(OperatorSpec::laplacian(), 0, 1),
                    std::invalid_argument);
}
