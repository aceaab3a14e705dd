#include "qclt/bogoliubov.hpp"

#include <doctest.h>

#include <random>

using namespace qclt;

namespace {

WaveFunction test_state(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    VecC v(g.modes());
    for (Eigen::Index i = 0; i < g.modes(); ++i) {
        double x = static_cast<double>(i) * g.spacing();
        double d = std::abs(x - 0.5 * g.length);
        d = std::min(d, g.length - d);
        v[i] = Complex(std::exp(-0.5 * d * d) + u(rng), u(rng));
    }
    WaveFunction phi(g, std::move(v));
    return phi.normalize();
}

MatC cosine_observable(const Grid& g) {
    MatC O = MatC::Zero(g.modes(), g.modes());
    for (Eigen::Index i = 0; i < g.modes(); ++i)
        O(i, i) = std::cos(2.0 * kPi * (static_cast<double>(i) * g.spacing()) / g.length);
    return O;
}

} // namespace

TEST_SUITE("bogoliubov") {

TEST_CASE("generator blocks at zero potential") {
    Grid g(1, 8, 4.0);
    PairPotential V0 = potential_table(g, VecR::Zero(8));
    WaveFunction phi = test_state(g, 1);
    QuadraticGenerator gen = build_generator(g, phi.values, V0, 1.0);
    CHECK((gen.D - (-laplacian_matrix(g)).cast<Complex>()).norm() <= 1e-12);
    CHECK(gen.B.norm() == 0.0);
}

TEST_CASE("generator structure for real data") {
    Grid g(1, 8, 4.0);
    PairPotential V = potential_gaussian(g, 1.1, 0.8);
    VecC v(8);
    for (int i = 0; i < 8; ++i) v[i] = std::exp(-0.4 * (i - 4.0) * (i - 4.0));
    WaveFunction phi(g, v);
    phi.normalize();
    QuadraticGenerator gen = build_generator(g, phi.values, V, 1.0);
    CHECK(gen.B.imag().norm() <= 1e-14);
    CHECK((gen.B - gen.B.transpose()).norm() <= 1e-14);
}

TEST_CASE("generator Hermiticity for complex data") {
    Grid g(1, 16, 6.0);
    PairPotential V = potential_soft_coulomb(g, 0.9, 0.4);
    WaveFunction phi = test_state(g, 3);
    QuadraticGenerator gen = build_generator(g, phi.values, V, 1.3);
    CHECK((gen.D - gen.D.adjoint()).norm() <= 1e-10 * (1.0 + gen.D.norm()));
    CHECK((gen.B - gen.B.transpose()).norm() <= 1e-10 * (1.0 + gen.B.norm()));
}

TEST_CASE("zero horizon gives the identity pair") {
    Grid g(1, 8, 4.0);
    BogoliubovPair p = identity_pair(g);
    CHECK((p.U - MatC::Identity(8, 8)).norm() == 0.0);
    CHECK(p.V.norm() == 0.0);
    CHECK(p.symplectic_defect() <= 1e-15);
}

TEST_CASE("free case: V block vanishes and U is the reversed free flow") {
    Grid g(1, 8, 8.0);
    PairPotential V0 = potential_table(g, VecR::Zero(8));
    WaveFunction phi = test_state(g, 5);
    double T = 0.4, dt = 1e-3;
    HartreeTrajectory traj = hartree_evolve(phi, T, dt, V0, 1.0, 1);
    BogoliubovPair th = propagate_theta(traj, dt);
    CHECK(th.V.norm() <= 1e-10);

    MatC Ufree(8, 8);
    for (int c = 0; c < 8; ++c) {
        VecC e = VecC::Zero(8);
        e[c] = 1.0;
        VecC eh = fft_forward(g, e);
        for (Eigen::Index k = 0; k < 8; ++k) eh[k] *= std::exp(Complex(0.0, g.ksq(k) * T));
        Ufree.col(c) = fft_inverse(g, eh);
    }
    CHECK((th.U - Ufree).norm() <= 1e-8);
    CHECK(check_ttph(th, traj.states.back(), traj.states.front()) <= 1e-8);
}

TEST_CASE("finite-difference consistency of the propagation law") {
    // dTheta/dt = i Theta A(t): central differences of the propagated flow
    // must reproduce the product at second order in the probe width.
    Grid g(1, 4, 4.0);
    PairPotential V = potential_gaussian(g, 0.9, 0.8);
    WaveFunction phi = test_state(g, 7);
    const double dt = 1e-5, t0 = 0.2;
    HartreeTrajectory traj = hartree_evolve(phi, 0.25, dt, V, 1.0, 1);
    QuadraticGenerator gen = build_generator(g, traj.interpolate(t0), V, 1.0, t0);
    BogoliubovPair base = propagate_theta(traj, dt, 0.0, t0);

    auto fd_error = [&](double eps) {
        BogoliubovPair plus = propagate_theta(traj, dt, 0.0, t0 + eps);
        BogoliubovPair minus = propagate_theta(traj, dt, 0.0, t0 - eps);
        MatC dU = (plus.U - minus.U) / (2.0 * eps);
        MatC dV = (plus.V - minus.V) / (2.0 * eps);
        const Complex i1(0.0, 1.0);
        MatC rU = dU - i1 * (base.U * gen.D + base.V.conjugate() * gen.B);
        MatC rV = dV - i1 * (base.V * gen.D + base.U.conjugate() * gen.B);
        return std::sqrt(rU.squaredNorm() + rV.squaredNorm());
    };
    double e1 = fd_error(8e-3);
    double e2 = fd_error(4e-3);
    CHECK(e1 / e2 >= 3.0);
    CHECK(e1 / e2 <= 5.0);
}

TEST_CASE("theta_apply block action") {
    Grid g(1, 8, 4.0);
    BogoliubovPair id = identity_pair(g);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VecC f(8), h(8);
    for (int i = 0; i < 8; ++i) {
        f[i] = Complex(u(rng), u(rng));
        h[i] = Complex(u(rng), u(rng));
    }
    auto [a, b] = theta_apply(id, f, h);
    CHECK((a - f).norm() == 0.0);
    CHECK((b - h).norm() == 0.0);

    PairPotential V = potential_gaussian(g, 0.8, 0.9);
    WaveFunction phi = test_state(g, 11);
    HartreeTrajectory traj = hartree_evolve(phi, 0.3, 1e-3, V, 1.0, 1);
    BogoliubovPair th = propagate_theta(traj, 1e-3);
    auto [uf, vf] = theta_apply(th, f, VecC::Zero(8));
    CHECK((uf - th.U * f).norm() <= 1e-14);
    CHECK((vf - th.V * f).norm() <= 1e-14);

    // the S-pairing <f1,f2> - <g1,g2> is preserved
    VecC f2(8), g2(8);
    for (int i = 0; i < 8; ++i) {
        f2[i] = Complex(u(rng), u(rng));
        g2[i] = Complex(u(rng), u(rng));
    }
    Complex before = inner(g, f, f2) - inner(g, h, g2);
    auto [p1, q1] = theta_apply(th, f, h);
    auto [p2, q2] = theta_apply(th, f2, g2);
    Complex after = inner(g, p1, p2) - inner(g, q1, q2);
    CHECK(std::abs(before - after) <= 1e-8 * (1.0 + std::abs(before)));
}

TEST_CASE("ttph residual decreases with dt") {
    Grid g(1, 8, 8.0);
    PairPotential V = potential_gaussian(g, 0.8, 1.0);
    WaveFunction phi = test_state(g, 13);
    double r_coarse = 0.0, r_fine = 0.0;
    {
        HartreeTrajectory traj = hartree_evolve(phi, 0.5, 1e-3, V, 1.0, 1);
        BogoliubovPair th = propagate_theta(traj, 1e-3);
        r_coarse = check_ttph(th, traj.states.back(), traj.states.front());
        CHECK(check_ttph(identity_pair(g), phi.values, phi.values) == 0.0);
        CHECK(r_coarse <= 1e-4);
    }
    {
        HartreeTrajectory traj = hartree_evolve(phi, 0.5, 5e-4, V, 1.0, 1);
        BogoliubovPair th = propagate_theta(traj, 5e-4);
        r_fine = check_ttph(th, traj.states.back(), traj.states.front());
    }
    CHECK(r_fine < r_coarse);
}

TEST_CASE("variance at time zero matches the i.i.d. formula") {
    Grid g(1, 8, 4.0);
    WaveFunction phi = test_state(g, 15);
    MatC O = cosine_observable(g);
    BogoliubovPair id = identity_pair(g);
    double expect = inner(g, O * phi.values, O * phi.values).real() -
                    std::pow(inner(g, phi.values, O * phi.values).real(), 2);
    CHECK(variance(id, O, phi.values, phi.values) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(variance(id, MatC::Identity(8, 8), phi.values, phi.values) <= 1e-12);

    MatC bad = O;
    bad(0, 1) = Complex(0.3, 0.2); // breaks Hermiticity
    CHECK_THROWS_AS(variance(id, bad, phi.values, phi.values), Error);
}

TEST_CASE("both lines of the variance formula agree") {
    Grid g(1, 8, 8.0);
    PairPotential V = potential_gaussian(g, 0.8, 1.0);
    WaveFunction phi = test_state(g, 17);
    MatC O = cosine_observable(g);
    HartreeTrajectory traj = hartree_evolve(phi, 0.5, 1e-3, V, 1.0, 1);
    BogoliubovPair th = propagate_theta(traj, 1e-3);
    const VecC& phit = traj.states.back();
    const VecC& phi0 = traj.states.front();

    double line2 = variance(th, O, phit, phi0);
    // first line: pairing form through theta_apply on (O phi_t, J O phi_t)
    VecC of = O * phit;
    auto [P, Q] = theta_apply(th, of, of.conjugate());
    Complex proj = (inner(g, P, phi0) + inner(g, Q, phi0.conjugate())) / std::sqrt(2.0);
    double line1 = 0.5 * (inner(g, P, P).real() + inner(g, Q, Q).real() - std::norm(proj));
    CHECK(std::abs(line1 - line2) <= 1e-9 * (1.0 + std::abs(line2)));

    // centered imaginary-part identity
    CHECK(std::abs(centered_pairing_imag(th, O, phit, phi0)) <= 1e-6);
}

TEST_CASE("variance is invariant under a global phase") {
    Grid g(1, 8, 8.0);
    PairPotential V = potential_gaussian(g, 0.8, 1.0);
    MatC O = cosine_observable(g);
    WaveFunction phi = test_state(g, 19);
    double s_base = 0.0, s_rot = 0.0;
    {
        HartreeTrajectory traj = hartree_evolve(phi, 0.4, 1e-3, V, 1.0, 1);
        BogoliubovPair th = propagate_theta(traj, 1e-3);
        s_base = variance(th, O, traj.states.back(), traj.states.front());
    }
    {
        WaveFunction rot(g, std::exp(Complex(0.0, 0.83)) * phi.values);
        HartreeTrajectory traj = hartree_evolve(rot, 0.4, 1e-3, V, 1.0, 1);
        BogoliubovPair th = propagate_theta(traj, 1e-3);
        s_rot = variance(th, O, traj.states.back(), traj.states.front());
    }
    CHECK(std::abs(s_base - s_rot) <= 1e-9 * (1.0 + s_base));
}

TEST_CASE("group property under composition") {
    Grid g(1, 8, 8.0);
    PairPotential V = potential_gaussian(g, 0.8, 1.0);
    WaveFunction phi = test_state(g, 21);
    HartreeTrajectory traj = hartree_evolve(phi, 1.0, 1e-3, V, 1.0, 1);
    BogoliubovPair full = propagate_theta(traj, 1e-3);
    BogoliubovPair a = propagate_theta(traj, 1e-3, 0.0, 0.4);
    BogoliubovPair b = propagate_theta(traj, 1e-3, 0.4, 1.0);
    BogoliubovPair comp = compose(a, b);
    double diff = (comp.U - full.U).norm() + (comp.V - full.V).norm();
    CHECK(diff <= 10.0 * (full.symplectic_defect() + 1e-12));
    CHECK(comp.t == full.t);
    CHECK(comp.s == full.s);
}

TEST_CASE("defect ceiling aborts a diverged propagation") {
    Grid g(1, 8, 8.0);
    PairPotential V = potential_gaussian(g, 0.8, 1.0);
    WaveFunction phi = test_state(g, 23);
    HartreeTrajectory traj = hartree_evolve(phi, 0.5, 1e-3, V, 1.0, 1);
    CHECK_THROWS_AS(propagate_theta(traj, 1e-3, 0.0, 0.5, 1e-18), Error);
}

} // TEST_SUITE
