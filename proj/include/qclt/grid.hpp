#pragma once

#include "qclt/types.hpp"

#include <vector>

namespace qclt {

/// Periodic d-dimensional lattice discretizing L^2. Points per axis n, box
/// length L, spacing h = L/n; M = n^d modes. The discrete inner product
/// carries the cell weight h^d so continuum formulas transfer verbatim.
struct Grid {
    int dim = 1;
    int points = 1;      // n, per axis
    double length = 1.0; // L

    Grid() = default;
    Grid(int d, int n, double L);

    double spacing() const { return length / points; }
    Eigen::Index modes() const { return modes_; }
    double cell() const; // h^d

    /// Flat index <-> multi-index (axis-0 fastest).
    void unflatten(Eigen::Index idx, int* out) const;
    Eigen::Index flatten(const int* mi) const;

    /// Signed periodic coordinate difference along one axis, in sites.
    int wrap(int delta) const;

    /// Ring distance |x| of lattice site index along one axis, in length units.
    double axis_distance(int i) const;

    /// Squared periodic wavenumber |k|^2 for flat index (k_j = 2*pi*m_j/L).
    double ksq(Eigen::Index idx) const;

private:
    Eigen::Index modes_ = 1;
};

double inner_real(const Grid& g, const VecC& f, const VecC& h);
Complex inner(const Grid& g, const VecC& f, const VecC& h);
double norm(const Grid& g, const VecC& f);

/// Entrywise complex conjugation in the position basis; J^2 = 1.
VecC conjugate_J(const VecC& f);

/// Forward/inverse DFT along every axis (inverse carries the 1/M factor).
VecC fft_forward(const Grid& g, const VecC& f);
VecC fft_inverse(const Grid& g, const VecC& f);

/// Spectral Laplacian (Fourier multiplier -|k|^2).
VecC laplacian_apply(const Grid& g, const VecC& f);

/// Dense matrix of the spectral Laplacian (real circulant kernel).
MatR laplacian_matrix(const Grid& g);

/// Even real two-body potential sampled on the lattice.
struct PairPotential {
    Grid grid;
    VecR values;   // V at lattice difference x, indexed like grid sites
    double sup = 0.0;

    PairPotential() = default;
    PairPotential(const Grid& g, VecR vals);

    /// V(x_i - x_j) via periodic difference of flat indices.
    double at_difference(Eigen::Index i, Eigen::Index j) const;
};

PairPotential potential_gaussian(const Grid& g, double amplitude, double width);
PairPotential potential_soft_coulomb(const Grid& g, double amplitude, double softening);
PairPotential potential_box(const Grid& g, double amplitude, double radius);
PairPotential potential_table(const Grid& g, VecR values);

/// Periodic convolution (V * rho)(x) = h^d sum_y V(x-y) rho(y), via FFT.
VecC convolve(const Grid& g, const PairPotential& V, const VecC& rho);

/// Complex field on a grid; `values` are sampled point values.
struct WaveFunction {
    Grid grid;
    VecC values;

    WaveFunction() = default;
    WaveFunction(const Grid& g, VecC vals);

    double norm() const;
    WaveFunction& normalize();
    bool is_normalized(double tol = 1e-9) const;
};

} // namespace qclt
