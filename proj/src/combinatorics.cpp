#include "qclt/combinatorics.hpp"

#include <cmath>
#include <random>

namespace qclt::combi {

double XiCoefficients::value(int ell) const {
    require(ell >= 0 && ell <= ell_max(), "input", "xi coefficient index out of range");
    return scaled[static_cast<std::size_t>(ell)].get_d() *
           std::pow(static_cast<double>(N), -0.5 * ell);
}

mpq_class XiCoefficients::exact_even(int m) const {
    int ell = 2 * m;
    require(ell >= 0 && ell <= ell_max(), "input", "xi coefficient index out of range");
    mpz_class npow = 1;
    for (int i = 0; i < m; ++i) npow *= N;
    mpq_class out = scaled[static_cast<std::size_t>(ell)] / mpq_class(npow);
    out.canonicalize();
    return out;
}

XiCoefficients xi_direct(long N, int ell_max) {
    require(N >= 1, "input", "xi_direct needs N >= 1");
    require(ell_max >= 0, "input", "xi_direct needs ell_max >= 0");
    require(ell_max <= N, "domain", "xi_direct needs ell_max <= N");

    // falling factorials ff[k] = N (N-1) ... (N-k+1), factorials, powers of N
    std::vector<mpz_class> ff(static_cast<std::size_t>(ell_max) + 1);
    std::vector<mpz_class> fact(static_cast<std::size_t>(ell_max) + 1);
    std::vector<mpz_class> npow(static_cast<std::size_t>(ell_max) + 1);
    ff[0] = 1;
    fact[0] = 1;
    npow[0] = 1;
    for (int k = 1; k <= ell_max; ++k) {
        ff[static_cast<std::size_t>(k)] = ff[static_cast<std::size_t>(k - 1)] * (N - k + 1);
        fact[static_cast<std::size_t>(k)] = fact[static_cast<std::size_t>(k - 1)] * k;
        npow[static_cast<std::size_t>(k)] = npow[static_cast<std::size_t>(k - 1)] * N;
    }

    XiCoefficients out;
    out.N = N;
    out.scaled.resize(static_cast<std::size_t>(ell_max) + 1);
    for (int ell = 0; ell <= ell_max; ++ell) {
        mpq_class acc = 0;
        for (int j = 0; j <= ell; ++j) {
            mpq_class term(npow[static_cast<std::size_t>(j)] * ff[static_cast<std::size_t>(ell - j)],
                           fact[static_cast<std::size_t>(ell - j)] * fact[static_cast<std::size_t>(j)]);
            term.canonicalize();
            if (j % 2 == 0)
                acc += term;
            else
                acc -= term;
        }
        acc.canonicalize();
        out.scaled[static_cast<std::size_t>(ell)] = acc;
    }
    return out;
}

XiCoefficients xi_recursive(long N, int ell_max) {
    require(N >= 1, "input", "xi_recursive needs N >= 1");
    require(ell_max >= 0, "input", "xi_recursive needs ell_max >= 0");
    XiCoefficients out;
    out.N = N;
    out.scaled.resize(static_cast<std::size_t>(ell_max) + 1);
    out.scaled[0] = 1;
    if (ell_max >= 1) out.scaled[1] = 0;
    for (int ell = 2; ell <= ell_max; ++ell) {
        // in the N^(-l/2)-scaled normalization the recursion reads
        //   r_l = ((1-l)/l) r_{l-1} - (N/l) r_{l-2}
        mpq_class a(1 - ell, ell);
        mpq_class b(N, ell);
        a.canonicalize();
        b.canonicalize();
        mpq_class r = a * out.scaled[static_cast<std::size_t>(ell - 1)] -
                      b * out.scaled[static_cast<std::size_t>(ell - 2)];
        r.canonicalize();
        out.scaled[static_cast<std::size_t>(ell)] = r;
    }
    return out;
}

mpq_class xi_limit_exact(int m) {
    require(m >= 0, "input", "xi_limit needs m >= 0");
    mpz_class den = 1;
    for (int i = 1; i <= m; ++i) den *= 2 * i; // 2^m m!
    mpq_class out(m % 2 == 0 ? mpz_class(1) : mpz_class(-1), den);
    out.canonicalize();
    return out;
}

double xi_limit(int m) { return xi_limit_exact(m).get_d(); }

double FieldPowerExpansion::eval(int m, double F_sq) const {
    require(m >= 0 && m <= ell, "input", "field power index out of range");
    return coeff[static_cast<std::size_t>(m)].get_d() * std::pow(F_sq, ell - m);
}

FieldPowerExpansion expand_field_power(int ell) {
    require(ell >= 0, "input", "expand_field_power needs ell >= 0");
    FieldPowerExpansion out;
    out.ell = ell;
    out.coeff.resize(static_cast<std::size_t>(ell) + 1);
    mpz_class fact2l = 1;
    for (int i = 1; i <= 2 * ell; ++i) fact2l *= i;
    for (int m = 0; m <= ell; ++m) {
        mpz_class den = 1;
        for (int i = 1; i <= 2 * m; ++i) den *= i;          // (2m)!
        for (int i = 1; i <= ell - m; ++i) den *= i;        // (l-m)!
        for (int i = 0; i < ell - m; ++i) den *= 2;         // 2^(l-m)
        mpq_class c(fact2l, den);
        c.canonicalize();
        out.coeff[static_cast<std::size_t>(m)] = c;
    }
    return out;
}

std::map<int, double> expand_field_power(int ell, double F_sq) {
    FieldPowerExpansion e = expand_field_power(ell);
    std::map<int, double> out;
    for (int m = 0; m <= ell; ++m) out[m] = e.eval(m, F_sq);
    return out;
}

std::uint64_t wick_count(int k) {
    require(k >= 0, "input", "wick_count needs k >= 0");
    require(k <= 34, "input", "wick_count overflows beyond k = 34");
    if (k % 2 == 1) return 0;
    std::uint64_t acc = 1;
    for (int j = k - 1; j > 1; j -= 2) acc *= static_cast<std::uint64_t>(j);
    return acc;
}

namespace {

// Single-mode ladder action on a dense coefficient vector over |0..nmax>.
void ladder_lower(const Complex& w, VecC& v) {
    for (Eigen::Index n = 0; n + 1 < v.size(); ++n)
        v[n] = w * std::sqrt(static_cast<double>(n + 1)) * v[n + 1];
    v[v.size() - 1] = 0.0;
}

void ladder_raise(const Complex& w, VecC& v) {
    for (Eigen::Index n = v.size() - 1; n >= 1; --n)
        v[n] = w * std::sqrt(static_cast<double>(n)) * v[n - 1];
    v[0] = 0.0;
}

std::uint64_t binom_u64(int n, int k) {
    long double acc = 1.0L;
    for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
    return static_cast<std::uint64_t>(std::llround(acc));
}

} // namespace

double normal_order_check(int ell, int trials, std::uint64_t seed) {
    require(ell >= 0 && ell <= 3, "input", "normal_order_check supports ell <= 3");
    require(trials >= 1, "input", "normal_order_check needs at least one trial");

    const int nmax = 24;
    const int support = nmax - 2 * ell - 1; // no mass can reach the truncation
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> mag(0.5, 1.25);

    FieldPowerExpansion expansion = expand_field_power(ell);
    double worst = 0.0;
    int redraws = 0;

    for (int trial = 0; trial < trials; ++trial) {
        Complex c = std::polar(mag(rng), kPi * unit(rng));
        double s = std::norm(c);
        VecC psi1 = VecC::Zero(nmax + 1), psi2 = VecC::Zero(nmax + 1);
        for (int n = 0; n <= support; ++n) {
            psi1[n] = Complex(unit(rng), unit(rng));
            psi2[n] = Complex(unit(rng), unit(rng));
        }
        psi1.normalize();
        psi2.normalize();

        // right side: <psi1, (a(F)+a*(F))^(2l) psi2> by repeated application
        VecC v = psi2;
        bool leaked = false;
        for (int k = 0; k < 2 * ell; ++k) {
            VecC lo = v, hi = v;
            ladder_lower(std::conj(c), lo);
            ladder_raise(c, hi);
            v = lo + hi;
            if (std::abs(v[nmax]) > 0.0 && k + 1 < 2 * ell) leaked = true;
        }
        if (leaked) {
            require(++redraws <= 10 * trials, "inconclusive-trial",
                    "normal_order_check kept leaking past the truncation");
            --trial;
            continue;
        }
        Complex rhs = psi1.dot(v);

        // left side: sum_m coeff_m ||F||^(2(l-m)) <psi1, :(a+a*)^(2m): psi2>
        Complex lhs(0.0, 0.0);
        double scale = std::abs(rhs);
        for (int m = 0; m <= ell; ++m) {
            Complex ordered(0.0, 0.0);
            for (int p = 0; p <= 2 * m; ++p) {
                int q = 2 * m - p;
                VecC w = psi2;
                for (int r = 0; r < q; ++r) ladder_lower(std::conj(c), w);
                for (int r = 0; r < p; ++r) ladder_raise(c, w);
                ordered += static_cast<double>(binom_u64(2 * m, p)) * psi1.dot(w);
            }
            Complex term = expansion.eval(m, s) * ordered;
            lhs += term;
            scale += std::abs(term);
        }
        double rel = std::abs(lhs - rhs) / std::max(scale, 1e-300);
        worst = std::max(worst, rel);
    }
    return worst;
}

} // namespace qclt::combi
