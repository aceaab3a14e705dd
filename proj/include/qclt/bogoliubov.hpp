#pragma once

#include "qclt/grid.hpp"
#include "qclt/hartree.hpp"

#include <utility>

namespace qclt {

/// Quadratic fluctuation generator blocks at one instant:
///   D f = -Lap f + kappa (V*|phi|^2) f + kappa (V* conj(phi) f) phi
///   B f = kappa (V* conj(phi) f) conj(phi)
/// D is Hermitian, B is symmetric in the position basis.
struct QuadraticGenerator {
    MatC D;
    MatC B;
    double t = 0.0;
};

QuadraticGenerator build_generator(const Grid& g, const VecC& phi_t, const PairPotential& V,
                                   double kappa, double t = 0.0);

/// Bogoliubov blocks of Theta(t;s) = [[U, JVJ],[V, JUJ]]. Theta maps time-t
/// pair data to time-s data; Theta(s;s) = 1.
struct BogoliubovPair {
    Grid grid;
    MatC U;
    MatC V;
    double t = 0.0;
    double s = 0.0;

    double symplectic_defect() const; // ||U'U - V'V - 1||_F
    double pairing_defect() const;    // ||U' JVJ - V' JUJ||_F
};

BogoliubovPair identity_pair(const Grid& g, double t = 0.0);

/// Integrates the block system from Theta(t_start;t_start) = 1 to
/// Theta(t_end;t_start) with classical RK4, sampling phi by linear
/// interpolation of the trajectory. Defects are monitored, not corrected.
BogoliubovPair propagate_theta(const HartreeTrajectory& traj, double dt,
                               double t_start, double t_end,
                               double defect_ceiling = 1e-3);
BogoliubovPair propagate_theta(const HartreeTrajectory& traj, double dt,
                               double defect_ceiling = 1e-3);

/// Composition Theta(t2;t0) = Theta(t1;t0) Theta(t2;t1).
BogoliubovPair compose(const BogoliubovPair& t1_from_t0, const BogoliubovPair& t2_from_t1);

/// Action of the block matrix on a pair:
/// (f,g) -> (U f + conj(V conj(g)), V f + conj(U conj(g))).
std::pair<VecC, VecC> theta_apply(const BogoliubovPair& p, const VecC& f, const VecC& g);

/// Residual of Theta(t;0)(phi_t, conj(phi_t)) = (phi_0, conj(phi_0)) in the
/// product norm.
double check_ttph(const BogoliubovPair& p, const VecC& phi_t, const VecC& phi0);

/// CLT variance: with w = U (O phi_t) + conj(V (O phi_t)),
/// sigma_t^2 = ||w||^2 - |<phi_0, w>|^2, clamped at zero.
double variance(const BogoliubovPair& p, const MatC& O, const VecC& phi_t, const VecC& phi0);

/// 2 Im <phi_0, U O_c phi_t + conj(V O_c phi_t)> with O_c the centered
/// observable; vanishes identically for an exact pair.
double centered_pairing_imag(const BogoliubovPair& p, const MatC& O, const VecC& phi_t,
                             const VecC& phi0);

} // namespace qclt
