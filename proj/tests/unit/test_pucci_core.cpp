#include <cmath>
#include <random>

#include "doctest.h"
#include "pucci/errors.hpp"
#include "pucci/pucci_core.hpp"

using namespace pucci;

TEST_CASE("eigenvalues of small symmetric matrices") {
    const auto d = sym_eigenvalues(SymMatrix{{1, 0}, {0, -1}});
    CHECK(d[0] == doctest::Approx(-1.0));
    CHECK(d[1] == doctest::Approx(1.0));

    const auto id = sym_eigenvalues(SymMatrix::identity(3));
    for (double v : id) CHECK(v == doctest::Approx(1.0));

    const auto m = sym_eigenvalues(SymMatrix{{2, 1}, {1, 2}});
    CHECK(m[0] == doctest::Approx(1.0));
    CHECK(m[1] == doctest::Approx(3.0));
}

TEST_CASE("eigenvalues match the 2x2 closed form") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int k = 0; k < 50; ++k) {
        const double a = u(rng), b = u(rng), c = u(rng);
        const auto ev = sym_eigenvalues(SymMatrix{{a, b}, {b, c}});
        const double disc = std::sqrt((a - c) * (a - c) + 4 * b * b);
        CHECK(ev[0] == doctest::Approx((a + c - disc) / 2).epsilon(1e-12));
        CHECK(ev[1] == doctest::Approx((a + c + disc) / 2).epsilon(1e-12));
    }
}

TEST_CASE("pucci operators on diagonal matrices") {
    const EllipticityPair ell(1, 2);
    const SymMatrix m{{2, 0}, {0, -3}};
    CHECK(pucci_plus(m, ell) == doctest::Approx(1.0));
    CHECK(pucci_minus(m, ell) == doctest::Approx(-4.0));
    CHECK(pucci_plus(SymMatrix(4), ell) == 0.0);
    CHECK(pucci_minus(SymMatrix::identity(5), ell) == doctest::Approx(5.0));
    CHECK(pucci::pucci(m, ell, Sign::plus) == pucci_plus(m, ell));
}

TEST_CASE("pucci operators are rotation invariant and dual") {
    const EllipticityPair ell(1, 5);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    for (int k = 0; k < 20; ++k) {
        SymMatrix m(3);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) m.set(i, j, n(rng));
        const auto q = random_orthogonal(3, 100 + k);
        const SymMatrix r = m.congruence(q);
        CHECK(pucci_plus(r, ell) == doctest::Approx(pucci_plus(m, ell)).epsilon(1e-12));
        CHECK(std::abs(pucci_plus(m, ell) + pucci_minus(-m, ell)) <= 1e-12 * m.frobenius_norm());
        CHECK(pucci_minus(m, ell) <= pucci_plus(m, ell));
    }
}

TEST_CASE("pucci operators in the laplacian limit give the trace") {
    const SymMatrix m{{1, 2, 0}, {2, -4, 1}, {0, 1, 0.5}};
    const EllipticityPair lap(3, 3);
    CHECK(pucci_plus(m, lap) == doctest::Approx(3 * m.trace()));
    CHECK(pucci_minus(m, lap) == doctest::Approx(3 * m.trace()));
}

TEST_CASE("sup oracle") {
    const EllipticityPair ell(1, 2);
    CHECK(pucci_sup_oracle(SymMatrix{{1, 0}, {0, -1}}, ell, 1, 0) == doctest::Approx(1.0));
    CHECK(pucci_sup_oracle(SymMatrix(3), ell, 10, 0) == 0.0);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    for (int k = 0; k < 10; ++k) {
        SymMatrix m(3);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) m.set(i, j, n(rng));
        const double gap = pucci_plus(m, ell) - pucci_sup_oracle(m, ell, 20000, k);
        CHECK(gap >= -1e-14 * m.frobenius_norm());
        CHECK(gap <= 1e-3 * m.frobenius_norm());
    }
    CHECK(pucci_sup_oracle(SymMatrix{{1, 2}, {2, 1}}, ell, 50, 9) ==
          pucci_sup_oracle(SymMatrix{{1, 2}, {2, 1}}, ell, 50, 9));
}

TEST_CASE("random orthogonal matrices are orthogonal") {
    const auto q = random_orthogonal(4, 17);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0;
            for (int k = 0; k < 4; ++k) s += q[i * 4 + k] * q[j * 4 + k];
            CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0));
        }
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(EllipticityPair(2, 1), InputError);
    CHECK_THROWS_AS(EllipticityPair(0, 1), InputError);
    CHECK_THROWS_AS(SymMatrix(2, {1, 2, 3, 4}), InputError);
    CHECK_THROWS_AS(pucci_plus(SymMatrix{{NAN, 0}, {0, 1}}, {}), InputError);
    CHECK_THROWS_AS(pucci_sup_oracle(SymMatrix(2), {}, 0, 1), InputError);
}
