#include "qclt/bogoliubov.hpp"

#include <cmath>

namespace qclt {

QuadraticGenerator build_generator(const Grid& g, const VecC& phi_t, const PairPotential& V,
                                   double kappa, double t) {
    require(phi_t.size() == g.modes(), "input-shape", "build_generator length mismatch");
    const Eigen::Index M = g.modes();
    const double hd = g.cell();

    QuadraticGenerator gen;
    gen.t = t;
    gen.D = (-laplacian_matrix(g)).cast<Complex>();
    VecC density = phi_t.cwiseAbs2().cast<Complex>();
    VecC w = convolve(g, V, density);
    for (Eigen::Index i = 0; i < M; ++i) gen.D(i, i) += kappa * w[i].real();

    gen.B.resize(M, M);
    for (Eigen::Index x = 0; x < M; ++x) {
        for (Eigen::Index y = 0; y < M; ++y) {
            double vxy = kappa * V.at_difference(x, y) * hd;
            gen.D(x, y) += vxy * phi_t[x] * std::conj(phi_t[y]);
            gen.B(x, y) = vxy * std::conj(phi_t[x]) * std::conj(phi_t[y]);
        }
    }

    double scale = 1.0 + gen.D.norm() + gen.B.norm();
    if ((gen.D - gen.D.adjoint()).norm() > 1e-10 * scale)
        fail("assembly", "generator block D is not Hermitian (inner-product weighting bug?)");
    if ((gen.B - gen.B.transpose()).norm() > 1e-10 * scale)
        fail("assembly", "generator block B is not symmetric");
    return gen;
}

double BogoliubovPair::symplectic_defect() const {
    MatC I = MatC::Identity(U.rows(), U.cols());
    return (U.adjoint() * U - V.adjoint() * V - I).norm();
}

double BogoliubovPair::pairing_defect() const {
    return (U.adjoint() * V.conjugate() - V.adjoint() * U.conjugate()).norm();
}

BogoliubovPair identity_pair(const Grid& g, double t) {
    BogoliubovPair p;
    p.grid = g;
    p.U = MatC::Identity(g.modes(), g.modes());
    p.V = MatC::Zero(g.modes(), g.modes());
    p.t = t;
    p.s = t;
    return p;
}

namespace {

// Right multiplication by the generator blocks: Theta solves
// dTheta/dt = i Theta A(t) with A = [[D, -JBJ],[B, -JDJ]]; substituting the
// block form of Theta gives
//   dU/dt = i (U D + conj(V) B),   dV/dt = i (V D + conj(U) B).
// This sign is the one consistent with Theta(t;s)(phi_t, conj phi_t) =
// (phi_s, conj phi_s) and with the conjugation relation of the limiting
// dynamics; the test suite checks both.
struct ThetaDerivative {
    MatC dU;
    MatC dV;
};

ThetaDerivative derivative(const MatC& U, const MatC& V, const QuadraticGenerator& gen) {
    const Complex i1(0.0, 1.0);
    ThetaDerivative d;
    d.dU = i1 * (U * gen.D + V.conjugate() * gen.B);
    d.dV = i1 * (V * gen.D + U.conjugate() * gen.B);
    return d;
}

} // namespace

BogoliubovPair propagate_theta(const HartreeTrajectory& traj, double dt, double t_start,
                               double t_end, double defect_ceiling) {
    require(dt > 0.0, "input", "propagate_theta requires dt > 0");
    const double eps = 1e-12 * (1.0 + std::abs(traj.t1()));
    require(t_start >= traj.t0() - eps && t_end <= traj.t1() + eps && t_start <= t_end,
            "input", "propagation window outside trajectory range");

    const Grid& g = traj.grid;
    auto gen_at = [&](double t) {
        return build_generator(g, traj.interpolate(t), traj.potential, traj.kappa, t);
    };

    BogoliubovPair p = identity_pair(g, t_start);
    p.s = t_start;
    double t = t_start;
    while (t < t_end - eps) {
        double h = std::min(dt, t_end - t);
        QuadraticGenerator g0 = gen_at(t);
        QuadraticGenerator gh = gen_at(t + h / 2.0);
        QuadraticGenerator g1 = gen_at(t + h);

        ThetaDerivative k1 = derivative(p.U, p.V, g0);
        ThetaDerivative k2 = derivative(p.U + 0.5 * h * k1.dU, p.V + 0.5 * h * k1.dV, gh);
        ThetaDerivative k3 = derivative(p.U + 0.5 * h * k2.dU, p.V + 0.5 * h * k2.dV, gh);
        ThetaDerivative k4 = derivative(p.U + h * k3.dU, p.V + h * k3.dV, g1);

        p.U += (h / 6.0) * (k1.dU + 2.0 * k2.dU + 2.0 * k3.dU + k4.dU);
        p.V += (h / 6.0) * (k1.dV + 2.0 * k2.dV + 2.0 * k3.dV + k4.dV);
        t += h;
    }
    p.t = t_end;

    if (p.symplectic_defect() > defect_ceiling || p.pairing_defect() > defect_ceiling)
        fail("propagation-diverged",
             "symplectic defect exceeds ceiling after propagation (defect=" +
                 std::to_string(p.symplectic_defect()) + ")");
    return p;
}

BogoliubovPair propagate_theta(const HartreeTrajectory& traj, double dt, double defect_ceiling) {
    return propagate_theta(traj, dt, traj.t0(), traj.t1(), defect_ceiling);
}

BogoliubovPair compose(const BogoliubovPair& a, const BogoliubovPair& b) {
    // a = Theta(t1;t0), b = Theta(t2;t1); product maps t2 data to t0 data.
    BogoliubovPair p;
    p.grid = a.grid;
    p.U = a.U * b.U + a.V.conjugate() * b.V;
    p.V = a.V * b.U + a.U.conjugate() * b.V;
    p.s = a.s;
    p.t = b.t;
    return p;
}

std::pair<VecC, VecC> theta_apply(const BogoliubovPair& p, const VecC& f, const VecC& g) {
    require(f.size() == p.U.rows() && g.size() == p.U.rows(), "input-shape",
            "theta_apply length mismatch");
    VecC first = p.U * f + (p.V * g.conjugate()).conjugate();
    VecC second = p.V * f + (p.U * g.conjugate()).conjugate();
    return {std::move(first), std::move(second)};
}

double check_ttph(const BogoliubovPair& p, const VecC& phi_t, const VecC& phi0) {
    auto [a, b] = theta_apply(p, phi_t, phi_t.conjugate());
    double r1 = norm(p.grid, a - phi0);
    double r2 = norm(p.grid, b - phi0.conjugate());
    return std::sqrt(r1 * r1 + r2 * r2);
}

namespace {

void require_hermitian(const MatC& O) {
    double scale = 1.0 + O.norm();
    require((O - O.adjoint()).norm() <= 1e-10 * scale, "input",
            "observable must be Hermitian");
}

} // namespace

double variance(const BogoliubovPair& p, const MatC& O, const VecC& phi_t, const VecC& phi0) {
    require_hermitian(O);
    VecC of = O * phi_t;
    VecC w = p.U * of + (p.V * of).conjugate();
    double n2 = inner_real(p.grid, w, w);
    Complex pr = inner(p.grid, phi0, w);
    double s2 = n2 - std::norm(pr);
    require(s2 >= -1e-10 * (1.0 + n2), "numeric", "variance came out negative beyond tolerance");
    return std::max(0.0, s2);
}

double centered_pairing_imag(const BogoliubovPair& p, const MatC& O, const VecC& phi_t,
                             const VecC& phi0) {
    require_hermitian(O);
    double lambda = inner(p.grid, phi_t, O * phi_t).real();
    VecC of = O * phi_t - lambda * phi_t;
    VecC w = p.U * of + (p.V * of).conjugate();
    return 2.0 * inner(p.grid, phi0, w).imag();
}

} // namespace qclt
