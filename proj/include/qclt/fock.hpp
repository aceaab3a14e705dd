#pragma once

#include "qclt/grid.hpp"
#include "qclt/hartree.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <unordered_map>
#include <vector>

namespace qclt::fock {

using Occ = std::vector<int>;
using SparseC = Eigen::SparseMatrix<Complex>;

/// Occupation-number basis of the fixed-N bosonic sector over M modes.
/// Tuples are enumerated in descending lexicographic order, so the first
/// entry is (N,0,...,0); size is binomial(N+M-1, M-1).
class SectorBasis {
public:
    SectorBasis(int modes, int particles, Eigen::Index capacity = kDefaultCapacity);

    int modes() const { return modes_; }
    int particles() const { return particles_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(occ_.size()); }
    const Occ& occupation(Eigen::Index i) const { return occ_[static_cast<std::size_t>(i)]; }
    Eigen::Index index_of(const Occ& o) const;

    static constexpr Eigen::Index kDefaultCapacity = 2'000'000;

private:
    int modes_;
    int particles_;
    std::vector<Occ> occ_;
    std::unordered_map<std::uint64_t, std::vector<Eigen::Index>> lookup_;
    friend class TruncatedBasis;
};

/// Truncated full Fock space: all tuples with total occupation <= nmax,
/// grouped by total (ascending), descending lexicographic within a sector.
class TruncatedBasis {
public:
    TruncatedBasis(int modes, int nmax, Eigen::Index capacity = SectorBasis::kDefaultCapacity);

    int modes() const { return modes_; }
    int nmax() const { return nmax_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(occ_.size()); }
    const Occ& occupation(Eigen::Index i) const { return occ_[static_cast<std::size_t>(i)]; }
    int total(Eigen::Index i) const { return total_[static_cast<std::size_t>(i)]; }
    Eigen::Index index_of(const Occ& o) const;
    Eigen::Index sector_begin(int n) const { return offsets_[static_cast<std::size_t>(n)]; }
    Eigen::Index sector_end(int n) const { return offsets_[static_cast<std::size_t>(n) + 1]; }

private:
    int modes_;
    int nmax_;
    std::vector<Occ> occ_;
    std::vector<int> total_;
    std::vector<Eigen::Index> offsets_;
    std::unordered_map<std::uint64_t, std::vector<Eigen::Index>> lookup_;
};

/// Coefficient vector on a truncated full Fock space. `leak` accumulates the
/// probability mass estimated to have been lost past nmax by the operations
/// that produced this vector.
struct FockVector {
    std::shared_ptr<const TruncatedBasis> basis;
    VecC coeff;
    double leak = 0.0;

    double norm() const { return coeff.norm(); }
    double sector_mass(int n) const;
    double top_sector_mass() const { return sector_mass(basis->nmax()); }
};

FockVector vacuum(std::shared_ptr<const TruncatedBasis> basis);

/// Operator on one occupation basis (sector or truncated), sparse storage.
struct SectorOperator {
    SparseC mat;
    bool hermitian = false;

    Eigen::Index dim() const { return mat.rows(); }
};

SectorOperator make_operator(SparseC mat, bool check_hermitian);

// --- mode ladder operators -------------------------------------------------

FockVector apply_create(int mode, const FockVector& v);
FockVector apply_annihilate(int mode, const FockVector& v);
SparseC create_matrix(int mode, const TruncatedBasis& basis);
SparseC annihilate_matrix(int mode, const TruncatedBasis& basis);

/// a(f) and a*(f) for an orthonormal-coefficient vector f.
FockVector apply_a(const VecC& f, const FockVector& v);
FockVector apply_adag(const VecC& f, const FockVector& v);

// --- second quantization ---------------------------------------------------

SectorOperator second_quantize(const MatC& O, const SectorBasis& basis);
SectorOperator second_quantize(const MatC& O, const TruncatedBasis& basis);

/// Mean-field Hamiltonian dGamma(-Lap) + (kappa/2N) sum_ij V_ij a*_i a*_j a_j a_i
/// on the fixed-N sector (modes = lattice sites).
SectorOperator build_hamiltonian(const Grid& g, const PairPotential& V, double kappa,
                                 const SectorBasis& basis);

/// Same Hamiltonian on the truncated full space; the 1/N scale is the model
/// parameter, independent of the sector an operand lives in.
SectorOperator build_hamiltonian_full(const Grid& g, const PairPotential& V, double kappa,
                                      int N, const TruncatedBasis& basis);

/// Quadratic fluctuation generator
///   dGamma(D) + (1/2) sum_ij (conj(B_ij) a*_i a*_j + B_ij a_i a_j)
/// on the truncated full space.
SectorOperator quadratic_generator_matrix(const MatC& D, const MatC& B,
                                          const TruncatedBasis& basis);

// --- exact evolution ---------------------------------------------------------

struct EvolveOptions {
    Eigen::Index dense_cutoff = 2000; // dense eigendecomposition below, Krylov above
    double krylov_tol = 1e-12;
    int krylov_dim = 48;
    double weyl_guard = 4.0; // require ||f||^2 * guard <= nmax
};

/// e^{-iHt} psi; unitary to the stated tolerance.
VecC evolve_exact(const SectorOperator& H, const VecC& psi, double t,
                  const EvolveOptions& opts = {});
FockVector evolve_exact(const SectorOperator& H, const FockVector& psi, double t,
                        const EvolveOptions& opts = {});

// --- states ------------------------------------------------------------------

/// Coefficients of the product state phi^(x)N on the sector basis
/// (orthonormal mode coefficients c_i = h^(d/2) phi_i).
VecC product_state(const Grid& g, const VecC& phi, const SectorBasis& basis);

/// Same state embedded into a truncated basis (total = N sector).
FockVector product_state_full(const Grid& g, const VecC& phi, int N,
                              std::shared_ptr<const TruncatedBasis> basis);

/// a*(c)^ell applied to the vacuum (not normalized; norm is sqrt(ell!)).
FockVector monomial_state(const VecC& c, int ell, std::shared_ptr<const TruncatedBasis> basis);

/// W(f) psi = e^(a*(f) - a(f)) psi via the exact-evolution machinery.
FockVector weyl_apply(const VecC& f, const FockVector& psi, const EvolveOptions& opts = {});

/// Mean and variance of the particle number in W(f)Omega (Poisson ||f||^2).
std::pair<double, double> coherent_number_stats(const VecC& f, int nmax,
                                                const EvolveOptions& opts = {});

/// xi_N = d_N W*(sqrt(N) c) a*(c)^N / sqrt(N!) Omega, with
/// d_N = sqrt(N!) e^(N/2) N^(-N/2) evaluated through log-gamma.
/// `margin` defaults to 2N; requires nmax >= N + margin.
FockVector xi_state(const VecC& c, int N, int nmax, int margin = -1,
                    const EvolveOptions& opts = {});

/// Fluctuation dynamics applied to the vacuum:
/// U(t;0) Omega = e^(-i omega) W*(sqrt(N) phi_t) e^(-i H_N t) W(sqrt(N) phi_0) Omega
/// with the phase omega(t;0) = (kappa N/2) int_0^t dtau <|phi|^2, V*|phi|^2>.
FockVector fluctuation_evolve(const HartreeTrajectory& traj, const SectorOperator& H_full,
                              std::shared_ptr<const TruncatedBasis> basis, int N, double t,
                              const EvolveOptions& opts = {});

/// Limiting quadratic dynamics U_inf(t;0) psi0 by midpoint-exponential
/// stepping of the time-dependent generator along the trajectory.
FockVector evolve_quadratic(const HartreeTrajectory& traj,
                            std::shared_ptr<const TruncatedBasis> basis,
                            const FockVector& psi0, double t_end, double dt,
                            const EvolveOptions& opts = {});

// --- diagnostics ---------------------------------------------------------------

/// Gamma_ij = <a*_i a_j> in the given state.
MatC two_point_matrix(const FockVector& psi);

double number_expectation(const FockVector& psi);
double number_variance(const FockVector& psi);

} // namespace qclt::fock
