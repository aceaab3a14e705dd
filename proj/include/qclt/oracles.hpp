#pragma once

// Brute-force reference engines used by the self-test subcommands and the
// test suites. Deliberately independent of the closed-form implementations
// they are used to check.

#include "qclt/types.hpp"

#include <gmpxx.h>

#include <vector>

namespace qclt::oracle {

/// State on the single-mode monomial ladder e_m = a*(F)^m Omega, coefficients
/// exact rationals for a rational s = ||F||^2. The ladder acts rationally:
///   a*(F) e_m = e_{m+1},   a(F) e_m = m s e_{m-1},
/// so (a+a*)^k Omega is exactly computable.
struct MonomialState {
    mpq_class s;
    std::vector<mpq_class> c;
};

MonomialState monomial_vacuum(const mpq_class& s, int capacity);
MonomialState apply_field(const MonomialState& v); // a(F) + a*(F)

/// Coefficients of (a(F)+a*(F))^(2l) Omega over e_{2m}, exact.
std::vector<mpq_class> field_power_brute(int ell, const mpq_class& s);

/// Number of perfect matchings of k labeled points, by direct enumeration.
std::uint64_t count_pair_partitions(int k);

/// k-th moment of the standard normal via composite Simpson quadrature.
double gaussian_moment_quadrature(int k);

} // namespace qclt::oracle
