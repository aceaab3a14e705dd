#pragma once

#include "qclt/grid.hpp"

#include <vector>

namespace qclt {

/// Time-sampled solution of i d/dt phi = -Lap phi + kappa (V*|phi|^2) phi.
struct HartreeTrajectory {
    Grid grid;
    std::vector<double> times;
    std::vector<VecC> states;
    double kappa = 1.0;
    PairPotential potential;

    double t0() const { return times.front(); }
    double t1() const { return times.back(); }

    /// Linear interpolation of the state between samples.
    VecC interpolate(double t) const;
};

/// One Strang split step: potential half-phase, spectral kinetic step,
/// potential half-phase with the updated density. Unitary by construction.
WaveFunction hartree_step(const WaveFunction& phi, double dt, const PairPotential& V,
                          double kappa);

HartreeTrajectory hartree_evolve(const WaveFunction& phi0, double T, double dt,
                                 const PairPotential& V, double kappa,
                                 int sample_stride = 1);

/// <phi,-Lap phi> + (kappa/2) <|phi|^2, V*|phi|^2>; conserved by the flow.
double hartree_energy(const WaveFunction& phi, const PairPotential& V, double kappa);

/// Discrete H^1 norm <phi,(1-Lap)phi>^(1/2).
double h1_norm(const WaveFunction& phi);

/// Entrywise clipping to |V| <= 1/alpha with sign preserved.
PairPotential regularize_potential(const PairPotential& V, double alpha);

/// ||phi_T - phitilde_T|| where phitilde evolves under the clipped potential.
double regularization_gap(const WaveFunction& phi0, double T, double dt,
                          const PairPotential& V, double kappa, double alpha);

} // namespace qclt
