#include "qclt/fock.hpp"

#include "qclt/bogoliubov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>

namespace qclt::fock {

namespace {

std::uint64_t occ_hash(const Occ& o) {
    std::uint64_t h = 1469598103934665603ull;
    for (int v : o) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
        h *= 1099511628211ull;
    }
    return h;
}

Eigen::Index lookup_in(const std::unordered_map<std::uint64_t, std::vector<Eigen::Index>>& map,
                       const std::vector<Occ>& occ, const Occ& o) {
    auto it = map.find(occ_hash(o));
    if (it == map.end()) return -1;
    for (Eigen::Index idx : it->second)
        if (occ[static_cast<std::size_t>(idx)] == o) return idx;
    return -1;
}

Eigen::Index binomial_checked(long n, long k, Eigen::Index capacity) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long double acc = 1.0L;
    for (long i = 1; i <= k; ++i) acc = acc * static_cast<long double>(n - k + i) / i;
    if (acc > static_cast<long double>(capacity) * 4.0L)
        fail("capacity", "occupation basis exceeds the configured memory budget");
    return static_cast<Eigen::Index>(std::llround(acc));
}

// Descending lexicographic enumeration of compositions of `total` into
// `modes` parts.
void enumerate_sector(int modes, int total, Occ& scratch, int mode,
                      const std::function<void(const Occ&)>& emit) {
    if (mode == modes - 1) {
        scratch[static_cast<std::size_t>(mode)] = total;
        emit(scratch);
        return;
    }
    for (int k = total; k >= 0; --k) {
        scratch[static_cast<std::size_t>(mode)] = k;
        enumerate_sector(modes, total - k, scratch, mode + 1, emit);
    }
}

} // namespace

SectorBasis::SectorBasis(int modes, int particles, Eigen::Index capacity)
    : modes_(modes), particles_(particles) {
    require(modes >= 1, "input", "sector basis needs at least one mode");
    require(particles >= 0, "input", "sector basis needs particle number >= 0");
    Eigen::Index expected = binomial_checked(particles + modes - 1, modes - 1, capacity);
    require(expected <= capacity, "capacity", "sector basis exceeds the configured budget");
    occ_.reserve(static_cast<std::size_t>(expected));
    Occ scratch(static_cast<std::size_t>(modes));
    enumerate_sector(modes, particles, scratch, 0, [&](const Occ& o) {
        lookup_[occ_hash(o)].push_back(static_cast<Eigen::Index>(occ_.size()));
        occ_.push_back(o);
    });
}

Eigen::Index SectorBasis::index_of(const Occ& o) const { return lookup_in(lookup_, occ_, o); }

TruncatedBasis::TruncatedBasis(int modes, int nmax, Eigen::Index capacity)
    : modes_(modes), nmax_(nmax) {
    require(modes >= 1, "input", "truncated basis needs at least one mode");
    require(nmax >= 0, "input", "truncated basis needs nmax >= 0");
    Eigen::Index expected = binomial_checked(nmax + modes, modes, capacity);
    require(expected <= capacity, "capacity", "truncated basis exceeds the configured budget");
    occ_.reserve(static_cast<std::size_t>(expected));
    Occ scratch(static_cast<std::size_t>(modes));
    offsets_.push_back(0);
    for (int n = 0; n <= nmax; ++n) {
        enumerate_sector(modes, n, scratch, 0, [&](const Occ& o) {
            lookup_[occ_hash(o)].push_back(static_cast<Eigen::Index>(occ_.size()));
            occ_.push_back(o);
            total_.push_back(n);
        });
        offsets_.push_back(static_cast<Eigen::Index>(occ_.size()));
    }
}

Eigen::Index TruncatedBasis::index_of(const Occ& o) const { return lookup_in(lookup_, occ_, o); }

double FockVector::sector_mass(int n) const {
    if (n < 0 || n > basis->nmax()) return 0.0;
    Eigen::Index b = basis->sector_begin(n), e = basis->sector_end(n);
    return coeff.segment(b, e - b).squaredNorm();
}

FockVector vacuum(std::shared_ptr<const TruncatedBasis> basis) {
    FockVector v;
    v.basis = std::move(basis);
    v.coeff = VecC::Zero(v.basis->size());
    v.coeff[0] = 1.0;
    return v;
}

SectorOperator make_operator(SparseC mat, bool check_hermitian) {
    SectorOperator op;
    op.mat = std::move(mat);
    if (check_hermitian) {
        SparseC adj = SparseC(op.mat.adjoint());
        double defect = SparseC(op.mat - adj).norm();
        require(defect <= 1e-10 * (1.0 + op.mat.norm()), "assembly",
                "operator failed its Hermiticity check");
        op.hermitian = true;
    }
    return op;
}

// --- ladder operators ---------------------------------------------------------

FockVector apply_create(int mode, const FockVector& v) {
    const TruncatedBasis& b = *v.basis;
    require(mode >= 0 && mode < b.modes(), "input", "mode index out of range");
    FockVector out;
    out.basis = v.basis;
    out.coeff = VecC::Zero(b.size());
    out.leak = v.leak;
    Occ target;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (v.coeff[i] == Complex(0.0, 0.0)) continue;
        if (b.total(i) >= b.nmax()) {
            // creation from the top sector truncates; account the lost mass
            out.leak += std::norm(v.coeff[i]) * (b.occupation(i)[static_cast<std::size_t>(mode)] + 1.0);
            continue;
        }
        target = b.occupation(i);
        int n = target[static_cast<std::size_t>(mode)];
        target[static_cast<std::size_t>(mode)] = n + 1;
        Eigen::Index j = b.index_of(target);
        out.coeff[j] += std::sqrt(static_cast<double>(n + 1)) * v.coeff[i];
    }
    return out;
}

FockVector apply_annihilate(int mode, const FockVector& v) {
    const TruncatedBasis& b = *v.basis;
    require(mode >= 0 && mode < b.modes(), "input", "mode index out of range");
    FockVector out;
    out.basis = v.basis;
    out.coeff = VecC::Zero(b.size());
    out.leak = v.leak;
    Occ target;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (v.coeff[i] == Complex(0.0, 0.0)) continue;
        int n = b.occupation(i)[static_cast<std::size_t>(mode)];
        if (n == 0) continue;
        target = b.occupation(i);
        target[static_cast<std::size_t>(mode)] = n - 1;
        Eigen::Index j = b.index_of(target);
        out.coeff[j] += std::sqrt(static_cast<double>(n)) * v.coeff[i];
    }
    return out;
}

SparseC create_matrix(int mode, const TruncatedBasis& b) {
    require(mode >= 0 && mode < b.modes(), "input", "mode index out of range");
    std::vector<Eigen::Triplet<Complex>> trip;
    Occ target;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (b.total(i) >= b.nmax()) continue;
        target = b.occupation(i);
        int n = target[static_cast<std::size_t>(mode)];
        target[static_cast<std::size_t>(mode)] = n + 1;
        Eigen::Index j = b.index_of(target);
        trip.emplace_back(j, i, Complex(std::sqrt(static_cast<double>(n + 1)), 0.0));
    }
    SparseC m(b.size(), b.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

SparseC annihilate_matrix(int mode, const TruncatedBasis& b) {
    return SparseC(create_matrix(mode, b).adjoint());
}

FockVector apply_a(const VecC& f, const FockVector& v) {
    const TruncatedBasis& b = *v.basis;
    require(f.size() == b.modes(), "input-shape", "apply_a coefficient length mismatch");
    FockVector out;
    out.basis = v.basis;
    out.coeff = VecC::Zero(b.size());
    out.leak = v.leak;
    Occ target;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (v.coeff[i] == Complex(0.0, 0.0)) continue;
        const Occ& occ = b.occupation(i);
        for (int m = 0; m < b.modes(); ++m) {
            int n = occ[static_cast<std::size_t>(m)];
            if (n == 0 || f[m] == Complex(0.0, 0.0)) continue;
            target = occ;
            target[static_cast<std::size_t>(m)] = n - 1;
            Eigen::Index j = b.index_of(target);
            out.coeff[j] += std::conj(f[m]) * std::sqrt(static_cast<double>(n)) * v.coeff[i];
        }
    }
    return out;
}

FockVector apply_adag(const VecC& f, const FockVector& v) {
    const TruncatedBasis& b = *v.basis;
    require(f.size() == b.modes(), "input-shape", "apply_adag coefficient length mismatch");
    FockVector out;
    out.basis = v.basis;
    out.coeff = VecC::Zero(b.size());
    out.leak = v.leak;
    Occ target;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (v.coeff[i] == Complex(0.0, 0.0)) continue;
        if (b.total(i) >= b.nmax()) {
            out.leak += std::norm(v.coeff[i]) * (b.total(i) + 1.0) * f.squaredNorm();
            continue;
        }
        const Occ& occ = b.occupation(i);
        for (int m = 0; m < b.modes(); ++m) {
            if (f[m] == Complex(0.0, 0.0)) continue;
            target = occ;
            int n = target[static_cast<std::size_t>(m)];
            target[static_cast<std::size_t>(m)] = n + 1;
            Eigen::Index j = b.index_of(target);
            out.coeff[j] += f[m] * std::sqrt(static_cast<double>(n + 1)) * v.coeff[i];
        }
    }
    return out;
}

// --- second quantization --------------------------------------------------------

namespace {

template <typename Basis>
SparseC dgamma_matrix(const MatC& O, const Basis& b) {
    require(O.rows() == b.modes() && O.cols() == b.modes(), "input-shape",
            "second_quantize matrix must be MxM over the basis modes");
    std::vector<Eigen::Triplet<Complex>> trip;
    Occ target;
    for (Eigen::Index idx = 0; idx < b.size(); ++idx) {
        const Occ& occ = b.occupation(idx);
        for (int j = 0; j < b.modes(); ++j) {
            int nj = occ[static_cast<std::size_t>(j)];
            if (nj == 0) continue;
            for (int i = 0; i < b.modes(); ++i) {
                if (O(i, j) == Complex(0.0, 0.0)) continue;
                if (i == j) {
                    trip.emplace_back(idx, idx, O(i, j) * static_cast<double>(nj));
                } else {
                    target = occ;
                    target[static_cast<std::size_t>(j)] = nj - 1;
                    int ni = target[static_cast<std::size_t>(i)];
                    target[static_cast<std::size_t>(i)] = ni + 1;
                    Eigen::Index tgt = b.index_of(target);
                    double amp = std::sqrt(static_cast<double>(nj) * (ni + 1.0));
                    trip.emplace_back(tgt, idx, O(i, j) * amp);
                }
            }
        }
    }
    SparseC m(b.size(), b.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

bool matrix_is_hermitian(const MatC& O) {
    return (O - O.adjoint()).norm() <= 1e-10 * (1.0 + O.norm());
}

template <typename Basis>
SparseC interaction_diagonal(const PairPotential& V, double kappa, int N, const Basis& b) {
    const int M = b.modes();
    MatR vij(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) vij(i, j) = V.at_difference(i, j);

    std::vector<Eigen::Triplet<Complex>> trip;
    for (Eigen::Index idx = 0; idx < b.size(); ++idx) {
        const Occ& occ = b.occupation(idx);
        double acc = 0.0;
        for (int i = 0; i < M; ++i) {
            int ni = occ[static_cast<std::size_t>(i)];
            if (ni == 0) continue;
            acc += vij(i, i) * ni * (ni - 1.0);
            for (int j = i + 1; j < M; ++j) {
                int nj = occ[static_cast<std::size_t>(j)];
                if (nj) acc += 2.0 * vij(i, j) * ni * static_cast<double>(nj);
            }
        }
        if (acc != 0.0) trip.emplace_back(idx, idx, Complex(kappa * acc / (2.0 * N), 0.0));
    }
    SparseC m(b.size(), b.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

} // namespace

SectorOperator second_quantize(const MatC& O, const SectorBasis& basis) {
    return make_operator(dgamma_matrix(O, basis), matrix_is_hermitian(O));
}

SectorOperator second_quantize(const MatC& O, const TruncatedBasis& basis) {
    return make_operator(dgamma_matrix(O, basis), matrix_is_hermitian(O));
}

SectorOperator build_hamiltonian(const Grid& g, const PairPotential& V, double kappa,
                                 const SectorBasis& basis) {
    require(basis.modes() == g.modes(), "input", "basis modes must equal grid sites");
    MatC kin = (-laplacian_matrix(g)).cast<Complex>();
    SparseC h = dgamma_matrix(kin, basis);
    if (basis.particles() >= 2)
        h = SparseC(h + interaction_diagonal(V, kappa, basis.particles(), basis));
    return make_operator(std::move(h), true);
}

SectorOperator build_hamiltonian_full(const Grid& g, const PairPotential& V, double kappa,
                                      int N, const TruncatedBasis& basis) {
    require(basis.modes() == g.modes(), "input", "basis modes must equal grid sites");
    require(N >= 1, "input", "Hamiltonian scale N must be >= 1");
    MatC kin = (-laplacian_matrix(g)).cast<Complex>();
    SparseC h = SparseC(dgamma_matrix(kin, basis) + interaction_diagonal(V, kappa, N, basis));
    return make_operator(std::move(h), true);
}

SectorOperator quadratic_generator_matrix(const MatC& D, const MatC& B,
                                          const TruncatedBasis& basis) {
    const int M = basis.modes();
    require(D.rows() == M && D.cols() == M && B.rows() == M && B.cols() == M, "input-shape",
            "generator blocks must be MxM");
    require(matrix_is_hermitian(D), "assembly", "generator block D must be Hermitian");
    require((B - B.transpose()).norm() <= 1e-10 * (1.0 + B.norm()), "assembly",
            "generator block B must be symmetric");

    SparseC h = dgamma_matrix(D, basis);

    // pair-creation part C = (1/2) sum_ij conj(B_ij) a*_i a*_j; full pair term
    // is C + C^dagger
    std::vector<Eigen::Triplet<Complex>> trip;
    Occ target;
    for (Eigen::Index idx = 0; idx < basis.size(); ++idx) {
        if (basis.total(idx) + 2 > basis.nmax()) continue;
        const Occ& occ = basis.occupation(idx);
        for (int i = 0; i < M; ++i) {
            for (int j = 0; j < M; ++j) {
                if (B(i, j) == Complex(0.0, 0.0)) continue;
                target = occ;
                int nj = target[static_cast<std::size_t>(j)];
                target[static_cast<std::size_t>(j)] = nj + 1;
                int ni = target[static_cast<std::size_t>(i)];
                target[static_cast<std::size_t>(i)] = ni + 1;
                Eigen::Index tgt = basis.index_of(target);
                double amp = std::sqrt((nj + 1.0) * (ni + 1.0));
                trip.emplace_back(tgt, idx, 0.5 * std::conj(B(i, j)) * amp);
            }
        }
    }
    SparseC c(basis.size(), basis.size());
    c.setFromTriplets(trip.begin(), trip.end());
    SparseC full = SparseC(h + c + SparseC(c.adjoint()));
    return make_operator(std::move(full), true);
}

// --- exact evolution ---------------------------------------------------------

namespace {

VecC dense_expm_apply(const SparseC& H, const VecC& psi, double t) {
    MatC dense = MatC(H);
    Eigen::SelfAdjointEigenSolver<MatC> es(dense);
    require(es.info() == Eigen::Success, "numeric", "dense eigendecomposition failed");
    VecC y = es.eigenvectors().adjoint() * psi;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        y[i] *= std::exp(Complex(0.0, -es.eigenvalues()[i] * t));
    return es.eigenvectors() * y;
}

// Lanczos approximation of e^{-iHt} v for Hermitian H, with adaptive
// substepping driven by the standard residual estimate.
VecC krylov_expm_apply(const SparseC& H, VecC v, double t, double tol, int mmax) {
    const double vnorm0 = v.norm();
    if (vnorm0 == 0.0 || t == 0.0) return v;
    double done = 0.0;
    const double total = std::abs(t);
    const double sgn = t >= 0.0 ? 1.0 : -1.0;
    int safety = 0;

    while (done < total * (1.0 - 1e-15)) {
        require(++safety < 100000, "tolerance", "Krylov evolution failed to advance");
        double beta0 = v.norm();
        if (beta0 == 0.0) return v;

        int m = std::min<int>(mmax, static_cast<int>(H.rows()));
        std::vector<VecC> Q;
        Q.reserve(static_cast<std::size_t>(m));
        VecR alpha(m), beta(m);
        Q.push_back(v / beta0);
        int built = 0;
        bool breakdown = false;
        for (int j = 0; j < m; ++j) {
            VecC w = H * Q[static_cast<std::size_t>(j)];
            Complex a = Q[static_cast<std::size_t>(j)].dot(w);
            alpha[j] = a.real();
            w -= a * Q[static_cast<std::size_t>(j)];
            if (j > 0) w -= beta[j - 1] * Q[static_cast<std::size_t>(j - 1)];
            // full reorthogonalization: cheap at these dimensions, removes
            // ghost eigenvalues
            for (const VecC& q : Q) w -= q.dot(w) * q;
            built = j + 1;
            double b = w.norm();
            beta[j] = b;
            if (b < 1e-14 * (1.0 + std::abs(alpha[j]))) {
                breakdown = true;
                break;
            }
            if (j + 1 < m) Q.push_back(w / b);
        }

        MatR T = MatR::Zero(built, built);
        for (int j = 0; j < built; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < built) {
                T(j, j + 1) = beta[j];
                T(j + 1, j) = beta[j];
            }
        }
        Eigen::SelfAdjointEigenSolver<MatR> es(T);
        require(es.info() == Eigen::Success, "numeric", "Krylov tridiagonal eigensolve failed");

        double tau = total - done;
        for (;;) {
            VecC y = VecC::Zero(built);
            VecR e1 = VecR::Zero(built);
            e1[0] = 1.0;
            VecR z = es.eigenvectors().transpose() * e1;
            for (int j = 0; j < built; ++j) {
                Complex phase = std::exp(Complex(0.0, -sgn * es.eigenvalues()[j] * tau));
                y += (z[j] * phase) * es.eigenvectors().col(j).cast<Complex>();
            }
            double err = breakdown ? 0.0 : std::abs(beta[built - 1]) * std::abs(y[built - 1]) * tau;
            if (err <= tol * std::max(1.0, beta0) || tau <= total * 1e-13) {
                if (tau <= total * 1e-13 && err > tol * std::max(1.0, beta0))
                    fail("tolerance", "Krylov substep underflow: dim=" + std::to_string(built) +
                                          " err=" + std::to_string(err));
                VecC next = VecC::Zero(v.size());
                for (int j = 0; j < built; ++j) next += (beta0 * y[j]) * Q[static_cast<std::size_t>(j)];
                v = std::move(next);
                done += tau;
                break;
            }
            tau *= 0.5;
        }
    }
    return v;
}

} // namespace

VecC evolve_exact(const SectorOperator& H, const VecC& psi, double t, const EvolveOptions& opts) {
    require(H.hermitian, "input", "evolve_exact requires a Hermitian operator");
    require(psi.size() == H.dim(), "input-shape", "evolve_exact state length mismatch");
    if (t == 0.0) return psi;
    if (H.dim() <= opts.dense_cutoff) return dense_expm_apply(H.mat, psi, t);
    return krylov_expm_apply(H.mat, psi, t, opts.krylov_tol, opts.krylov_dim);
}

FockVector evolve_exact(const SectorOperator& H, const FockVector& psi, double t,
                        const EvolveOptions& opts) {
    FockVector out;
    out.basis = psi.basis;
    out.coeff = evolve_exact(H, psi.coeff, t, opts);
    out.leak = psi.leak + std::abs(out.coeff.squaredNorm() - psi.coeff.squaredNorm());
    return out;
}

// --- states ------------------------------------------------------------------

namespace {

VecC product_coefficients(const VecC& c, int N, const SectorBasis& basis) {
    const double lgN = std::lgamma(N + 1.0);
    VecC out(basis.size());
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        const Occ& occ = basis.occupation(i);
        double lg = lgN;
        Complex mono(1.0, 0.0);
        for (int m = 0; m < basis.modes(); ++m) {
            int n = occ[static_cast<std::size_t>(m)];
            if (n == 0) continue;
            lg -= std::lgamma(n + 1.0);
            for (int r = 0; r < n; ++r) mono *= c[m];
        }
        out[i] = std::exp(0.5 * lg) * mono;
    }
    return out;
}

} // namespace

VecC product_state(const Grid& g, const VecC& phi, const SectorBasis& basis) {
    require(phi.size() == g.modes() && basis.modes() == g.modes(), "input-shape",
            "product_state length mismatch");
    VecC c = std::sqrt(g.cell()) * phi;
    return product_coefficients(c, basis.particles(), basis);
}

FockVector product_state_full(const Grid& g, const VecC& phi, int N,
                              std::shared_ptr<const TruncatedBasis> basis) {
    require(N <= basis->nmax(), "input", "product state does not fit below the truncation");
    SectorBasis sector(basis->modes(), N);
    VecC c = std::sqrt(g.cell()) * phi;
    VecC sec = product_coefficients(c, N, sector);
    FockVector out;
    out.basis = std::move(basis);
    out.coeff = VecC::Zero(out.basis->size());
    Eigen::Index b = out.basis->sector_begin(N);
    // sector enumeration order matches the truncated basis within a sector
    out.coeff.segment(b, sec.size()) = sec;
    return out;
}

FockVector monomial_state(const VecC& c, int ell, std::shared_ptr<const TruncatedBasis> basis) {
    require(ell >= 0 && ell <= basis->nmax(), "input", "monomial_state does not fit");
    if (ell == 0) return vacuum(std::move(basis));
    // a*(c)^ell Omega = sqrt(ell!) times the multinomial expansion, any c
    SectorBasis sector(basis->modes(), ell);
    VecC sec = product_coefficients(c, ell, sector);
    double scale = std::exp(0.5 * std::lgamma(ell + 1.0));
    FockVector out;
    out.basis = std::move(basis);
    out.coeff = VecC::Zero(out.basis->size());
    out.coeff.segment(out.basis->sector_begin(ell), sec.size()) = scale * sec;
    return out;
}

FockVector weyl_apply(const VecC& f, const FockVector& psi, const EvolveOptions& opts) {
    const TruncatedBasis& b = *psi.basis;
    require(f.size() == b.modes(), "input-shape", "weyl_apply coefficient length mismatch");
    double f2 = f.squaredNorm();
    if (f2 * opts.weyl_guard > b.nmax() * (1.0 + 1e-9))
        fail("truncation-risk", "weyl_apply: ||f||^2 = " + std::to_string(f2) +
                                    " too large for nmax = " + std::to_string(b.nmax()));
    if (f2 == 0.0) return psi;

    SparseC gen(b.size(), b.size());
    for (int m = 0; m < b.modes(); ++m) {
        if (f[m] == Complex(0.0, 0.0)) continue;
        SparseC cm = create_matrix(m, b);
        gen = SparseC(gen + f[m] * cm - std::conj(f[m]) * SparseC(cm.adjoint()));
    }
    // W = e^{A} with A anti-Hermitian; iA is Hermitian, so W = e^{-i (iA)}.
    SectorOperator h = make_operator(SparseC(Complex(0.0, 1.0) * gen), true);
    return evolve_exact(h, psi, 1.0, opts);
}

std::pair<double, double> coherent_number_stats(const VecC& f, int nmax,
                                                const EvolveOptions& opts) {
    auto basis = std::make_shared<TruncatedBasis>(static_cast<int>(f.size()), nmax);
    FockVector state = weyl_apply(f, vacuum(basis), opts);
    return {number_expectation(state), number_variance(state)};
}

FockVector xi_state(const VecC& c, int N, int nmax, int margin, const EvolveOptions& opts) {
    require(N >= 0, "input", "xi_state needs N >= 0");
    if (margin < 0) margin = 2 * N;
    if (nmax < N + margin)
        fail("truncation-risk", "xi_state: nmax must be at least N + margin = " +
                                    std::to_string(N + margin));
    require(std::abs(c.norm() - 1.0) <= 1e-10, "input", "xi_state needs a unit-norm mode vector");

    auto basis = std::make_shared<TruncatedBasis>(static_cast<int>(c.size()), nmax);
    // a*(c)^N / sqrt(N!) applied to the vacuum is the N-particle product state
    FockVector psi;
    psi.basis = basis;
    psi.coeff = VecC::Zero(basis->size());
    SectorBasis sector(basis->modes(), N);
    VecC sec = product_coefficients(c, N, sector);
    psi.coeff.segment(basis->sector_begin(N), sec.size()) = sec;

    EvolveOptions relaxed = opts;
    relaxed.weyl_guard = std::min(opts.weyl_guard, static_cast<double>(nmax) / std::max(1, N));
    FockVector out = weyl_apply(-std::sqrt(static_cast<double>(N)) * c, psi, relaxed);
    double log_dn = 0.5 * std::lgamma(N + 1.0) + 0.5 * N - 0.5 * N * std::log(std::max(1, N));
    out.coeff *= std::exp(log_dn);
    return out;
}

FockVector fluctuation_evolve(const HartreeTrajectory& traj, const SectorOperator& H_full,
                              std::shared_ptr<const TruncatedBasis> basis, int N, double t,
                              const EvolveOptions& opts) {
    const Grid& g = traj.grid;
    require(basis->modes() == g.modes(), "input", "basis modes must equal grid sites");
    const double sqn = std::sqrt(static_cast<double>(N));
    VecC c0 = std::sqrt(g.cell()) * traj.states.front();
    VecC ct = std::sqrt(g.cell()) * traj.interpolate(t);

    FockVector psi = weyl_apply(sqn * c0, vacuum(basis), opts);
    psi = evolve_exact(H_full, psi, t, opts);
    psi = weyl_apply(-sqn * ct, psi, opts);

    // phase omega(t;0) = (kappa N / 2) int_0^t <|phi|^2, V*|phi|^2> dtau,
    // trapezoid over the trajectory samples
    double omega = 0.0;
    auto integrand = [&](const VecC& phi) {
        VecC density = phi.cwiseAbs2().cast<Complex>();
        return inner_real(g, density, convolve(g, traj.potential, density));
    };
    double prev_t = traj.times.front();
    double prev_v = integrand(traj.states.front());
    for (std::size_t i = 1; i < traj.times.size() && prev_t < t; ++i) {
        double ti = std::min(traj.times[i], t);
        double vi = integrand(ti < traj.times[i] ? traj.interpolate(ti) : traj.states[i]);
        omega += 0.5 * (prev_v + vi) * (ti - prev_t);
        prev_t = ti;
        prev_v = vi;
    }
    omega *= 0.5 * traj.kappa * N;
    psi.coeff *= std::exp(Complex(0.0, -omega));
    return psi;
}

FockVector evolve_quadratic(const HartreeTrajectory& traj,
                            std::shared_ptr<const TruncatedBasis> basis,
                            const FockVector& psi0, double t_end, double dt,
                            const EvolveOptions& opts) {
    require(dt > 0.0, "input", "evolve_quadratic requires dt > 0");
    const Grid& g = traj.grid;
    FockVector psi = psi0;
    double t = traj.t0();
    const double eps = 1e-12 * (1.0 + std::abs(t_end));
    while (t < t_end - eps) {
        double h = std::min(dt, t_end - t);
        qclt::QuadraticGenerator gen =
            build_generator(g, traj.interpolate(t + h / 2.0), traj.potential, traj.kappa);
        SectorOperator L = quadratic_generator_matrix(gen.D, gen.B, *basis);
        psi = evolve_exact(L, psi, h, opts);
        t += h;
    }
    return psi;
}

// --- diagnostics ---------------------------------------------------------------

MatC two_point_matrix(const FockVector& psi) {
    const int M = psi.basis->modes();
    std::vector<FockVector> lowered;
    lowered.reserve(static_cast<std::size_t>(M));
    VecC e = VecC::Zero(M);
    for (int m = 0; m < M; ++m) {
        e.setZero();
        e[m] = 1.0;
        lowered.push_back(apply_a(e, psi));
    }
    MatC gamma(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            gamma(i, j) = lowered[static_cast<std::size_t>(i)].coeff.dot(
                lowered[static_cast<std::size_t>(j)].coeff);
    return gamma;
}

double number_expectation(const FockVector& psi) {
    double acc = 0.0;
    for (int n = 0; n <= psi.basis->nmax(); ++n) acc += n * psi.sector_mass(n);
    return acc;
}

double number_variance(const FockVector& psi) {
    double m1 = 0.0, m2 = 0.0;
    for (int n = 0; n <= psi.basis->nmax(); ++n) {
        double p = psi.sector_mass(n);
        m1 += n * p;
        m2 += static_cast<double>(n) * n * p;
    }
    return m2 - m1 * m1;
}

} // namespace qclt::fock
