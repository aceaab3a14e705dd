#include "qclt/clt.hpp"

#include "qclt/oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace qclt;
using fock::Occ;

namespace {

struct Setup {
    Grid g = Grid(1, 4, 4.0);
    MatC O;
    WaveFunction phi;

    Setup() : phi(g, VecC::Zero(4)) {
        O = MatC::Zero(4, 4);
        for (int i = 0; i < 4; ++i) O(i, i) = std::cos(2.0 * kPi * i / 4.0);
        VecC v(4);
        v << Complex(0.9, 0.05), Complex(0.55, -0.2), Complex(0.3, 0.1), Complex(0.5, 0.0);
        phi = WaveFunction(g, v).normalize();
    }
};

} // namespace

TEST_SUITE("clt") {

TEST_CASE("fluctuation observable basics") {
    Setup s;
    fock::SectorBasis b(4, 3);

    // O = identity centers to zero
    fock::SectorOperator zero =
        fluctuation_observable(MatC::Identity(4, 4), s.g, s.phi.values, b);
    CHECK(MatC(zero.mat).norm() <= 1e-12);

    // N = 1: the observable reduces to O - <phi,O phi> on the one-particle sector
    fock::SectorBasis b1(4, 1);
    fock::SectorOperator ot = fluctuation_observable(s.O, s.g, s.phi.values, b1);
    double lambda = inner(s.g, s.phi.values, s.O * s.phi.values).real();
    // the sector basis lists modes in enumeration order (e_i at index of e_i)
    MatC dense = MatC(ot.mat);
    MatC expect = MatC::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
        Occ ei(4, 0);
        ei[static_cast<std::size_t>(i)] = 1;
        for (int j = 0; j < 4; ++j) {
            Occ ej(4, 0);
            ej[static_cast<std::size_t>(j)] = 1;
            expect(b1.index_of(ei), b1.index_of(ej)) = s.O(i, j) - (i == j ? lambda : 0.0);
        }
    }
    CHECK((dense - expect).norm() <= 1e-12);

    // first moment vanishes on the matching product state
    fock::SectorBasis b3(4, 3);
    VecC ps = fock::product_state(s.g, s.phi.values, b3);
    fock::SectorOperator o3 = fluctuation_observable(s.O, s.g, s.phi.values, b3);
    CHECK(std::abs(exact_moments(ps, o3, 1)[0]) <= 1e-10);
}

TEST_CASE("second moment of a product state is the one-particle variance") {
    Setup s;
    for (int N : {2, 5}) {
        fock::SectorBasis b(4, N);
        VecC ps = fock::product_state(s.g, s.phi.values, b);
        fock::SectorOperator ot = fluctuation_observable(s.O, s.g, s.phi.values, b);
        std::vector<double> m = exact_moments(ps, ot, 2);
        double lambda = inner(s.g, s.phi.values, s.O * s.phi.values).real();
        double var1 = inner(s.g, s.O * s.phi.values, s.O * s.phi.values).real() - lambda * lambda;
        CHECK(std::abs(m[1] - var1) <= 1e-10);
        // self-adjointness consistency: m2 = ||O_t psi||^2
        CHECK(std::abs(m[1] - (ot.mat * ps).squaredNorm()) <= 1e-10);
    }
}

TEST_CASE("moments of the zero operator vanish and the cost guard holds") {
    Setup s;
    fock::SectorBasis b(4, 2);
    VecC ps = fock::product_state(s.g, s.phi.values, b);
    fock::SparseC z(b.size(), b.size());
    fock::SectorOperator zero = fock::make_operator(std::move(z), true);
    for (double m : exact_moments(ps, zero, 4)) CHECK(m == 0.0);
    CHECK_THROWS_AS(exact_moments(ps, zero, 9), Error);
}

TEST_CASE("gaussian moments") {
    CHECK(gaussian_moment(0.73, 2) == doctest::Approx(0.73).epsilon(1e-15));
    CHECK(gaussian_moment(1.0, 4) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(gaussian_moment(1.0, 1) == 0.0);
    CHECK(gaussian_moment(0.5, 3) == 0.0);
    CHECK(gaussian_moment(1.0, 6) ==
          doctest::Approx(oracle::gaussian_moment_quadrature(6)).epsilon(1e-9));
    CHECK(gaussian_moment(0.8, 4) ==
          doctest::Approx(oracle::gaussian_moment_quadrature(4) * 0.64).epsilon(1e-9));
    CHECK_THROWS_AS(gaussian_moment(-0.1, 2), Error);
}

TEST_CASE("reduced density matrix") {
    Setup s;
    fock::SectorBasis b(4, 3);
    VecC ps = fock::product_state(s.g, s.phi.values, b);
    MatC gamma = reduced_density(ps, b);
    VecC c = std::sqrt(s.g.cell()) * s.phi.values;
    CHECK((gamma - c * c.adjoint()).norm() <= 1e-12);

    // random state: trace one, Hermitian, spectrum in [0,1]
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VecC psi(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) psi[i] = Complex(u(rng), u(rng));
    psi.normalize();
    MatC gr = reduced_density(psi, b);
    CHECK(std::abs(gr.trace().real() - 1.0) <= 1e-12);
    CHECK((gr - gr.adjoint()).norm() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<MatC> es(gr);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-10);

    CHECK_THROWS_AS(reduced_density(2.0 * psi, b), Error); // trace off
}

TEST_CASE("trace norm gap") {
    Setup s;
    fock::SectorBasis b(4, 3);
    VecC ps = fock::product_state(s.g, s.phi.values, b);
    CHECK(trace_norm_gap(reduced_density(ps, b), s.g, s.phi.values) <= 1e-10);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VecC psi(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) psi[i] = Complex(u(rng), u(rng));
    psi.normalize();
    double gap = trace_norm_gap(reduced_density(psi, b), s.g, s.phi.values);
    CHECK(gap <= 2.0 + 1e-12);
}

TEST_CASE("markov bound") {
    Setup s;
    const int N = 4;
    fock::SectorBasis b(4, N);
    VecC ps = fock::product_state(s.g, s.phi.values, b);
    double lambda = inner(s.g, s.phi.values, s.O * s.phi.values).real();
    double var1 = inner(s.g, s.O * s.phi.values, s.O * s.phi.values).real() - lambda * lambda;
    double bound = lln_bound(ps, s.O, s.g, s.phi.values, b, 0.3);
    CHECK(bound == doctest::Approx(var1 / (0.3 * 0.3 * N)).epsilon(1e-10));
    // 1/eps^2 scaling
    CHECK(lln_bound(ps, s.O, s.g, s.phi.values, b, 0.6) ==
          doctest::Approx(bound / 4.0).epsilon(1e-10));
    CHECK_THROWS_AS(lln_bound(ps, s.O, s.g, s.phi.values, b, 0.0), Error);
}

TEST_CASE("clt_run with zero horizon reproduces the i.i.d. picture") {
    RunConfig cfg = standard_config();
    cfg.horizon = 0.0;
    cfg.sweep = {3, 6};
    cfg.k_max = 4;
    std::vector<MomentReport> reps = clt_run(cfg);
    REQUIRE(reps.size() == 2);
    Grid g = make_grid(cfg);
    MatC O = make_observable(cfg, g);
    WaveFunction phi = make_initial_state(cfg, g);
    double lambda = inner(g, phi.values, O * phi.values).real();
    double var1 = inner(g, O * phi.values, O * phi.values).real() - lambda * lambda;
    for (const MomentReport& r : reps) {
        CHECK(r.sigma2 == doctest::Approx(var1).epsilon(1e-10));
        CHECK(std::abs(r.records[0].exact) <= 1e-10);          // centered exactly
        CHECK(std::abs(r.records[1].exact - var1) <= 1e-10);   // i.i.d. second moment
        CHECK(r.trace_gap <= 1e-10);                           // still a product state
    }
    // fourth-moment discrepancy shrinks with N
    CHECK(reps[1].records[3].abs_err < reps[0].records[3].abs_err);
}

TEST_CASE("clt_run with zero coupling uses the freely evolved variance") {
    RunConfig cfg = standard_config();
    cfg.kappa = 0.0;
    cfg.sweep = {3};
    cfg.horizon = 0.3;
    std::vector<MomentReport> reps = clt_run(cfg);
    Grid g = make_grid(cfg);
    PairPotential V = make_potential(cfg, g);
    MatC O = make_observable(cfg, g);
    WaveFunction phi = make_initial_state(cfg, g);
    HartreeTrajectory traj = hartree_evolve(phi, cfg.horizon, cfg.dt, V, 0.0, 1);
    const VecC& phit = traj.states.back();
    double lambda = inner(g, phit, O * phit).real();
    double expect = inner(g, O * phit, O * phit).real() - lambda * lambda;
    CHECK(reps[0].sigma2 == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("kurtosis ratio approaches three along the sweep") {
    RunConfig cfg = standard_config();
    std::vector<MomentReport> reps = clt_run(cfg);
    auto ratio = [](const MomentReport& r) {
        return r.records[3].exact / (r.records[1].exact * r.records[1].exact);
    };
    CHECK(std::abs(ratio(reps.back()) - 3.0) <= 0.5);
    CHECK(std::abs(ratio(reps.back()) - 3.0) < std::abs(ratio(reps.front()) - 3.0));
    // odd-moment decay
    CHECK(std::abs(reps.back().records[2].exact) < std::abs(reps.front().records[2].exact));
}

} // TEST_SUITE
