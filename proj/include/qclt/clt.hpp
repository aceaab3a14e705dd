#pragma once

#include "qclt/bogoliubov.hpp"
#include "qclt/config.hpp"
#include "qclt/fock.hpp"

#include <vector>

namespace qclt {

struct MomentRecord {
    int k = 0;
    double exact = 0.0;
    double gaussian = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
};

struct MomentReport {
    int N = 0;
    double t = 0.0;
    double sigma2 = 0.0;
    std::vector<MomentRecord> records;
    double trace_gap = 0.0;
    double delta_centering = 0.0; // sqrt(N) Tr O (|phi_t><phi_t| - gamma)
    double symplectic_defect = 0.0;
    double pairing_defect = 0.0;
    double ttph_residual = 0.0;
    double evolution_norm_drift = 0.0;
    std::string config_hash;
};

/// O_t = N^(-1/2) (dGamma(O) - N <phi_t, O phi_t>) on the fixed-N sector.
fock::SectorOperator fluctuation_observable(const MatC& O, const Grid& g, const VecC& phi_t,
                                            const fock::SectorBasis& basis);

/// Same with an explicit centering constant (the O'_t variant).
fock::SectorOperator fluctuation_observable_centered(const MatC& O, double lambda,
                                                     const fock::SectorBasis& basis);

/// Moments <psi, O_t^k psi> for k = 1..k_max (k_max <= 8).
std::vector<double> exact_moments(const VecC& psi, const fock::SectorOperator& Ot, int k_max);

/// Central Gaussian moment: 0 for odd k, (k-1)!! sigma2^(k/2) for even k.
double gaussian_moment(double sigma2, int k);

/// One-particle reduced density gamma_ij = <psi, a*_j a_i psi>/N; trace one.
MatC reduced_density(const VecC& psi, const fock::SectorBasis& basis);

/// Tr | gamma - |phi_t><phi_t| | via eigenvalues of the Hermitian difference.
double trace_norm_gap(const MatC& gamma, const Grid& g, const VecC& phi_t);

/// Markov second-moment bound on P(|N^-1 sum Otilde_j| >= eps).
double lln_bound(const VecC& psi, const MatC& O, const Grid& g, const VecC& phi_t,
                 const fock::SectorBasis& basis, double eps);

/// End-to-end pipeline: Hartree trajectory, Bogoliubov variance, exact
/// sector evolution, moment comparison; one report per sweep N.
std::vector<MomentReport> clt_run(const RunConfig& cfg);

} // namespace qclt
