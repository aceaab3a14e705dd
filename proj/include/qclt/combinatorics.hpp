#pragma once

#include "qclt/types.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <vector>

namespace qclt::combi {

/// Expansion coefficients xi_N^(l) of xi_N over a*(phi)^l Omega. Each value
/// factors as an exact rational times N^(-l/2):
///   xi_N^(l) = scaled[l] * N^(-l/2)
/// Even l therefore yields an exact rational; odd l carries one sqrt(N).
struct XiCoefficients {
    long N = 0;
    std::vector<mpq_class> scaled;

    int ell_max() const { return static_cast<int>(scaled.size()) - 1; }
    double value(int ell) const;
    /// Exact rational value of xi_N^(2m) (integer power of N).
    mpq_class exact_even(int m) const;
};

/// Direct evaluation of xi_N^(l) = sum_j (-1)^j N^(j-l/2) N!/((N-l+j)! (l-j)! j!),
/// with incremental falling factorials (never full factorials).
XiCoefficients xi_direct(long N, int ell_max);

/// Three-term recursion xi^(l) = ((1-l)/l) N^(-1/2) xi^(l-1) - (1/l) xi^(l-2),
/// seeded with xi^(0) = 1, xi^(1) = 0.
XiCoefficients xi_recursive(long N, int ell_max);

/// N->infinity limit of xi_N^(2m); the odd-index coefficients tend to 0.
mpq_class xi_limit_exact(int m);
double xi_limit(int m);

/// Coefficients of (a(F)+a*(F))^(2l) Omega over a*(F)^(2m) Omega:
/// coefficient[m] * ||F||^(2(l-m)), exact rationals.
struct FieldPowerExpansion {
    int ell = 0;
    std::vector<mpq_class> coeff; // index m = 0..ell

    double eval(int m, double F_sq) const;
};

FieldPowerExpansion expand_field_power(int ell);

/// Convenience form: map m -> coefficient evaluated at ||F||^2.
std::map<int, double> expand_field_power(int ell, double F_sq);

/// Pair-partition count: (k-1)!! for even k, 0 for odd.
std::uint64_t wick_count(int k);

/// Verifies the normal-ordering summation identity on a single-mode
/// truncated Fock space with random states; returns the worst relative
/// discrepancy over the trials.
double normal_order_check(int ell, int trials, std::uint64_t seed = 12345);

} // namespace qclt::combi
