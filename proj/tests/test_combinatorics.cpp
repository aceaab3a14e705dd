#include "qclt/combinatorics.hpp"

#include "qclt/fock.hpp"
#include "qclt/oracles.hpp"

#include <doctest.h>

using namespace qclt;

TEST_SUITE("combinatorics") {

TEST_CASE("xi coefficients: seeds and the frozen small case") {
    for (long N : {1L, 2L, 7L, 100L}) {
        combi::XiCoefficients x = combi::xi_direct(N, static_cast<int>(std::min(N, 6L)));
        CHECK(x.scaled[0] == 1);
        if (x.ell_max() >= 1) CHECK(x.scaled[1] == 0);
    }
    // N = 2, l = 2: the three-term sum gives -1/2
    combi::XiCoefficients x2 = combi::xi_direct(2, 2);
    CHECK(x2.exact_even(1) == mpq_class(-1, 2));
    CHECK(x2.value(2) == doctest::Approx(-0.5).epsilon(1e-15));

    combi::XiCoefficients r2 = combi::xi_recursive(2, 3);
    CHECK(r2.exact_even(1) == mpq_class(-1, 2));
}

TEST_CASE("direct and recursive constructions agree exactly") {
    for (long N : {1L, 2L, 3L, 10L, 57L, 200L}) {
        int lmax = static_cast<int>(std::min<long>(20, N));
        combi::XiCoefficients a = combi::xi_direct(N, lmax);
        combi::XiCoefficients b = combi::xi_recursive(N, lmax);
        for (int l = 0; l <= lmax; ++l)
            CHECK(a.scaled[static_cast<std::size_t>(l)] == b.scaled[static_cast<std::size_t>(l)]);
    }
    CHECK_THROWS_AS(combi::xi_direct(5, 6), Error); // ell_max > N
}

TEST_CASE("limits of the xi coefficients") {
    CHECK(combi::xi_limit(0) == 1.0);
    CHECK(combi::xi_limit(1) == -0.5);
    CHECK(combi::xi_limit(2) == 0.125);
    CHECK(combi::xi_limit_exact(3) == mpq_class(-1, 48));

    // odd coefficients decay like N^(-1/2); even deviations like 1/N
    for (int m : {1, 2, 3}) {
        double v100 = std::abs(combi::xi_direct(100, 2 * m + 1).value(2 * m + 1));
        double v10000 = std::abs(combi::xi_direct(10000, 2 * m + 1).value(2 * m + 1));
        double slope = std::log10(v10000 / v100) / 2.0;
        CHECK(std::abs(slope + 0.5) <= 0.1);
    }
    for (int m : {2, 3, 4}) {
        mpq_class d100 = combi::xi_direct(100, 2 * m).exact_even(m) - combi::xi_limit_exact(m);
        mpq_class d10000 = combi::xi_direct(10000, 2 * m).exact_even(m) - combi::xi_limit_exact(m);
        double slope = std::log10(std::abs(d10000.get_d() / d100.get_d())) / 2.0;
        CHECK(std::abs(slope + 1.0) <= 0.1);
    }
    // the first two even deviations vanish identically
    CHECK(combi::xi_direct(123, 2).exact_even(1) == combi::xi_limit_exact(1));
    CHECK(combi::xi_direct(123, 0).exact_even(0) == combi::xi_limit_exact(0));
}

TEST_CASE("field power expansion: small cases and the exact oracle") {
    combi::FieldPowerExpansion e0 = combi::expand_field_power(0);
    CHECK(e0.coeff.size() == 1);
    CHECK(e0.coeff[0] == 1);

    // l = 1: (a+a*)^2 Omega = ||F||^2 Omega + a*(F)^2 Omega
    combi::FieldPowerExpansion e1 = combi::expand_field_power(1);
    CHECK(e1.coeff[0] == 1);
    CHECK(e1.coeff[1] == 1);
    auto ev = combi::expand_field_power(1, 0.37);
    CHECK(ev[0] == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-15));

    for (int ell = 0; ell <= 5; ++ell) {
        for (mpq_class s : {mpq_class(1), mpq_class(7, 3), mpq_class(2, 5)}) {
            std::vector<mpq_class> brute = oracle::field_power_brute(ell, s);
            combi::FieldPowerExpansion e = combi::expand_field_power(ell);
            for (int m = 0; m <= ell; ++m) {
                mpq_class expect = e.coeff[static_cast<std::size_t>(m)];
                for (int p = 0; p < ell - m; ++p) expect *= s;
                CHECK(expect == brute[static_cast<std::size_t>(m)]);
            }
        }
    }
}

TEST_CASE("field power expansion satisfies the inductive step") {
    // applying (a+a*)^2 to the expansion advances l by one:
    // c_{l+1}(m) = c_l(m-1) + (4m+1) c_l(m) + (2m+2)(2m+1) c_l(m+1)
    for (int ell = 0; ell <= 10; ++ell) {
        combi::FieldPowerExpansion cur = combi::expand_field_power(ell);
        combi::FieldPowerExpansion nxt = combi::expand_field_power(ell + 1);
        for (int m = 0; m <= ell + 1; ++m) {
            mpq_class expect = 0;
            if (m >= 1) expect += cur.coeff[static_cast<std::size_t>(m - 1)];
            if (m <= ell) expect += mpq_class(4 * m + 1) * cur.coeff[static_cast<std::size_t>(m)];
            if (m + 1 <= ell)
                expect += mpq_class((2 * m + 2) * (2 * m + 1)) *
                          cur.coeff[static_cast<std::size_t>(m + 1)];
            CHECK(nxt.coeff[static_cast<std::size_t>(m)] == expect);
        }
    }
}

TEST_CASE("field power expansion against the fock ladder in floating point") {
    // independent float route: M = 1 truncated Fock space, N_max = 12
    auto basis = std::make_shared<fock::TruncatedBasis>(1, 12);
    VecC f(1);
    f[0] = Complex(0.7, -0.4);
    double s = std::norm(f[0]);
    for (int ell = 0; ell <= 5; ++ell) {
        fock::FockVector v = fock::vacuum(basis);
        for (int k = 0; k < 2 * ell; ++k) {
            fock::FockVector lo = fock::apply_a(f, v);
            fock::FockVector hi = fock::apply_adag(f, v);
            v.coeff = lo.coeff + hi.coeff;
        }
        combi::FieldPowerExpansion e = combi::expand_field_power(ell);
        fock::FockVector expect = fock::vacuum(basis);
        expect.coeff.setZero();
        for (int m = 0; m <= ell; ++m) {
            fock::FockVector mono = fock::monomial_state(f, 2 * m, basis);
            expect.coeff +=
                e.coeff[static_cast<std::size_t>(m)].get_d() * std::pow(s, ell - m) * mono.coeff;
        }
        CHECK((v.coeff - expect.coeff).norm() <= 1e-12 * (1.0 + expect.coeff.norm()));
    }
}

TEST_CASE("wick counts") {
    CHECK(combi::wick_count(0) == 1);
    CHECK(combi::wick_count(2) == 1);
    CHECK(combi::wick_count(3) == 0);
    CHECK(combi::wick_count(8) == 105);
    for (int k = 0; k <= 12; ++k) CHECK(combi::wick_count(k) == oracle::count_pair_partitions(k));
}

TEST_CASE("normal ordering identity") {
    CHECK(combi::normal_order_check(0, 5) == 0.0);
    CHECK(combi::normal_order_check(1, 50) <= 1e-12);
    CHECK(combi::normal_order_check(2, 100) <= 1e-10);
    CHECK(combi::normal_order_check(3, 100) <= 1e-10);
    CHECK_THROWS_AS(combi::normal_order_check(4, 10), Error);
}

} // TEST_SUITE
