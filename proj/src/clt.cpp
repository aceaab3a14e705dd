#include "qclt/clt.hpp"

#include "qclt/combinatorics.hpp"
#include "qclt/io.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>

namespace qclt {

namespace {

void require_hermitian(const MatC& O) {
    require((O - O.adjoint()).norm() <= 1e-10 * (1.0 + O.norm()), "input",
            "observable must be Hermitian");
}

} // namespace

fock::SectorOperator fluctuation_observable_centered(const MatC& O, double lambda,
                                                     const fock::SectorBasis& basis) {
    require_hermitian(O);
    const int N = basis.particles();
    fock::SectorOperator dg = fock::second_quantize(O, basis);
    fock::SparseC id(basis.size(), basis.size());
    id.setIdentity();
    double scale = 1.0 / std::sqrt(static_cast<double>(N));
    fock::SparseC m = fock::SparseC(scale * (dg.mat - Complex(N * lambda, 0.0) * id));
    return fock::make_operator(std::move(m), true);
}

fock::SectorOperator fluctuation_observable(const MatC& O, const Grid& g, const VecC& phi_t,
                                            const fock::SectorBasis& basis) {
    require_hermitian(O);
    double lambda = inner(g, phi_t, O * phi_t).real();
    return fluctuation_observable_centered(O, lambda, basis);
}

std::vector<double> exact_moments(const VecC& psi, const fock::SectorOperator& Ot, int k_max) {
    require(k_max >= 1 && k_max <= 8, "input", "exact_moments supports k_max in 1..8");
    require(psi.size() == Ot.dim(), "input-shape", "exact_moments state length mismatch");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k_max));
    VecC v = psi;
    for (int k = 1; k <= k_max; ++k) {
        v = Ot.mat * v;
        Complex m = psi.dot(v);
        require(std::abs(m.imag()) <= 1e-10 * (1.0 + std::abs(m)), "numeric",
                "moment of a Hermitian observable came out complex");
        out.push_back(m.real());
    }
    return out;
}

double gaussian_moment(double sigma2, int k) {
    require(sigma2 >= 0.0, "input", "gaussian_moment needs sigma2 >= 0");
    require(k >= 0, "input", "gaussian_moment needs k >= 0");
    if (k % 2 == 1) return 0.0;
    return static_cast<double>(combi::wick_count(k)) * std::pow(sigma2, k / 2);
}

MatC reduced_density(const VecC& psi, const fock::SectorBasis& basis) {
    require(psi.size() == basis.size(), "input-shape", "reduced_density state length mismatch");
    const int M = basis.modes();
    const int N = basis.particles();
    require(N >= 1, "input", "reduced_density needs at least one particle");
    MatC gamma = MatC::Zero(M, M);
    fock::Occ target;
    for (Eigen::Index idx = 0; idx < basis.size(); ++idx) {
        Complex c = psi[idx];
        if (c == Complex(0.0, 0.0)) continue;
        const fock::Occ& occ = basis.occupation(idx);
        for (int i = 0; i < M; ++i) {
            int ni = occ[static_cast<std::size_t>(i)];
            if (ni == 0) continue;
            gamma(i, i) += Complex(std::norm(c) * ni, 0.0);
            for (int j = 0; j < M; ++j) {
                if (j == i) continue;
                target = occ;
                target[static_cast<std::size_t>(i)] = ni - 1;
                int nj = target[static_cast<std::size_t>(j)];
                target[static_cast<std::size_t>(j)] = nj + 1;
                Eigen::Index tgt = basis.index_of(target);
                double amp = std::sqrt(ni * (nj + 1.0));
                // gamma_ij = <psi, a*_j a_i psi>
                gamma(i, j) += std::conj(psi[tgt]) * c * amp;
            }
        }
    }
    gamma /= static_cast<double>(N);
    double tr = gamma.trace().real();
    require(std::abs(tr - 1.0) <= 1e-8, "numeric",
            "reduced density trace deviates from one: " + std::to_string(tr));
    return gamma;
}

double trace_norm_gap(const MatC& gamma, const Grid& g, const VecC& phi_t) {
    VecC c = std::sqrt(g.cell()) * phi_t;
    MatC diff = gamma - c * c.adjoint();
    Eigen::SelfAdjointEigenSolver<MatC> es(diff);
    require(es.info() == Eigen::Success, "numeric", "trace-norm eigensolve failed");
    return es.eigenvalues().cwiseAbs().sum();
}

double lln_bound(const VecC& psi, const MatC& O, const Grid& g, const VecC& phi_t,
                 const fock::SectorBasis& basis, double eps) {
    require(eps > 0.0, "input", "lln_bound needs eps > 0");
    fock::SectorOperator Ot = fluctuation_observable(O, g, phi_t, basis);
    double m2 = exact_moments(psi, Ot, 2)[1];
    return m2 / (eps * eps * basis.particles());
}

namespace {

MomentReport run_single_N(const RunConfig& cfg, int N, const HartreeTrajectory& traj,
                          const BogoliubovPair& theta, const MatC& O,
                          const std::string& config_hash) {
    const Grid g = make_grid(cfg);
    const VecC& phi0 = traj.states.front();
    const VecC phi_t = traj.states.back();

    MomentReport rep;
    rep.N = N;
    rep.t = cfg.horizon;
    rep.config_hash = config_hash;
    rep.symplectic_defect = theta.symplectic_defect();
    rep.pairing_defect = theta.pairing_defect();
    rep.ttph_residual = check_ttph(theta, phi_t, phi0);
    rep.sigma2 = variance(theta, O, phi_t, phi0);

    fock::SectorBasis basis(static_cast<int>(g.modes()), N);
    fock::SectorOperator H = fock::build_hamiltonian(g, traj.potential, cfg.kappa, basis);
    VecC psi0 = fock::product_state(g, phi0, basis);
    VecC psi_t = fock::evolve_exact(H, psi0, cfg.horizon,
                                    fock::EvolveOptions{.krylov_tol = cfg.tolerances.krylov});
    rep.evolution_norm_drift = std::abs(psi_t.norm() - 1.0);

    MatC gamma = reduced_density(psi_t, basis);
    rep.trace_gap = trace_norm_gap(gamma, g, phi_t);

    double lambda_hartree = inner(g, phi_t, O * phi_t).real();
    VecC c = std::sqrt(g.cell()) * phi_t;
    double lambda_reduced = (O * gamma).trace().real();
    rep.delta_centering = std::sqrt(static_cast<double>(N)) *
                          ((c.adjoint() * O * c)(0).real() - lambda_reduced);

    double lambda = cfg.centering == "reduced" ? lambda_reduced : lambda_hartree;
    fock::SectorOperator Ot = fluctuation_observable_centered(O, lambda, basis);
    std::vector<double> moments = exact_moments(psi_t, Ot, cfg.k_max);

    for (int k = 1; k <= cfg.k_max; ++k) {
        MomentRecord rec;
        rec.k = k;
        rec.exact = moments[static_cast<std::size_t>(k - 1)];
        rec.gaussian = gaussian_moment(rep.sigma2, k);
        rec.abs_err = std::abs(rec.exact - rec.gaussian);
        rec.rel_err = rec.abs_err / std::max(1e-300, std::abs(rec.gaussian) + std::abs(rec.exact));
        rep.records.push_back(rec);
    }
    return rep;
}

int thread_budget() {
    if (const char* env = std::getenv("QCLT_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

std::vector<MomentReport> clt_run(const RunConfig& cfg) {
    cfg.validate();
    const Grid g = make_grid(cfg);
    const PairPotential V = make_potential(cfg, g);
    const MatC O = make_observable(cfg, g);
    WaveFunction phi0 = make_initial_state(cfg, g);
    const std::string config_hash = fnv64_hex(config_to_json_text(cfg));

    // stage shared by every sweep point: the mean-field pair (trajectory, Theta)
    HartreeTrajectory traj =
        hartree_evolve(phi0, cfg.horizon, cfg.dt, V, cfg.kappa, cfg.sample_stride);
    BogoliubovPair theta = cfg.horizon > 0.0
                               ? propagate_theta(traj, cfg.dt, cfg.tolerances.symplectic_ceiling)
                               : identity_pair(g);

    std::vector<MomentReport> reports(cfg.sweep.size());
    const int budget = thread_budget();
    std::size_t next = 0;
    while (next < cfg.sweep.size()) {
        std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(budget),
                                                  cfg.sweep.size() - next);
        std::vector<std::future<MomentReport>> futs;
        for (std::size_t b = 0; b < batch; ++b) {
            int N = cfg.sweep[next + b];
            futs.push_back(std::async(std::launch::async, [&, N] {
                return run_single_N(cfg, N, traj, theta, O, config_hash);
            }));
        }
        for (std::size_t b = 0; b < batch; ++b) reports[next + b] = futs[b].get();
        next += batch;
    }
    return reports;
}

} // namespace qclt
