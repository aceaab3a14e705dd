#include "qclt/hartree.hpp"

#include <algorithm>
#include <cmath>

namespace qclt {

VecC HartreeTrajectory::interpolate(double t) const {
    const double eps = 1e-12 * (1.0 + std::abs(t1()));
    require(t >= t0() - eps && t <= t1() + eps, "input",
            "interpolation time outside trajectory range");
    t = std::clamp(t, t0(), t1());
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return states.front();
    if (it == times.end()) return states.back();
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    std::size_t lo = hi - 1;
    double w = (t - times[lo]) / (times[hi] - times[lo]);
    return (1.0 - w) * states[lo] + w * states[hi];
}

namespace {

void check_finite(const VecC& v) {
    if (!v.allFinite()) fail("numeric-overflow", "non-finite values in Hartree state");
}

VecC potential_phase(const Grid& g, const PairPotential& V, double kappa, const VecC& phi,
                     double dt_half) {
    VecC density = phi.cwiseAbs2().cast<Complex>();
    VecC w = convolve(g, V, density); // real up to roundoff
    VecC out(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        out[i] = phi[i] * std::exp(Complex(0.0, -kappa * w[i].real() * dt_half));
    return out;
}

} // namespace

WaveFunction hartree_step(const WaveFunction& phi, double dt, const PairPotential& V,
                          double kappa) {
    require(dt > 0.0, "input", "hartree_step requires dt > 0");
    const Grid& g = phi.grid;
    VecC v = potential_phase(g, V, kappa, phi.values, dt / 2.0);
    // exact free flow e^{i Lap dt}: Fourier multiplier e^{-i |k|^2 dt}
    VecC vh = fft_forward(g, v);
    for (Eigen::Index i = 0; i < vh.size(); ++i)
        vh[i] *= std::exp(Complex(0.0, -g.ksq(i) * dt));
    v = fft_inverse(g, vh);
    v = potential_phase(g, V, kappa, v, dt / 2.0);
    check_finite(v);
    return WaveFunction(g, std::move(v));
}

HartreeTrajectory hartree_evolve(const WaveFunction& phi0, double T, double dt,
                                 const PairPotential& V, double kappa, int sample_stride) {
    require(T >= 0.0, "input", "hartree_evolve requires T >= 0");
    require(dt > 0.0, "input", "hartree_evolve requires dt > 0");
    require(sample_stride >= 1, "input", "sample stride must be >= 1");
    HartreeTrajectory traj;
    traj.grid = phi0.grid;
    traj.kappa = kappa;
    traj.potential = V;
    traj.times.push_back(0.0);
    traj.states.push_back(phi0.values);
    if (T == 0.0) return traj;

    WaveFunction phi = phi0;
    double t = 0.0;
    long step = 0;
    const double eps = 1e-12 * std::max(1.0, T);
    while (t < T - eps) {
        double h = std::min(dt, T - t);
        phi = hartree_step(phi, h, V, kappa);
        t += h;
        ++step;
        bool at_end = t >= T - eps;
        if (step % sample_stride == 0 || at_end) {
            traj.times.push_back(at_end ? T : t);
            traj.states.push_back(phi.values);
        }
    }
    return traj;
}

double hartree_energy(const WaveFunction& phi, const PairPotential& V, double kappa) {
    const Grid& g = phi.grid;
    Complex kin = -inner(g, phi.values, laplacian_apply(g, phi.values));
    VecC density = phi.values.cwiseAbs2().cast<Complex>();
    Complex pot = inner(g, density, convolve(g, V, density));
    Complex e = kin + 0.5 * kappa * pot;
    double scale = std::abs(e) + 1.0;
    require(std::abs(e.imag()) <= 1e-12 * scale, "numeric",
            "hartree_energy quadratic form has non-real value");
    return e.real();
}

double h1_norm(const WaveFunction& phi) {
    const Grid& g = phi.grid;
    double v = inner_real(g, phi.values, phi.values) -
               inner_real(g, phi.values, laplacian_apply(g, phi.values));
    return std::sqrt(std::max(0.0, v));
}

PairPotential regularize_potential(const PairPotential& V, double alpha) {
    require(alpha > 0.0, "input", "regularization cutoff alpha must be positive");
    const double cap = 1.0 / alpha;
    VecR vals = V.values;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        double s = vals[i] >= 0.0 ? 1.0 : -1.0;
        vals[i] = s * std::min(std::abs(vals[i]), cap);
    }
    return PairPotential(V.grid, std::move(vals));
}

double regularization_gap(const WaveFunction& phi0, double T, double dt,
                          const PairPotential& V, double kappa, double alpha) {
    PairPotential Vreg = regularize_potential(V, alpha);
    HartreeTrajectory a = hartree_evolve(phi0, T, dt, V, kappa, std::max<int>(1, static_cast<int>(T / dt)));
    HartreeTrajectory b = hartree_evolve(phi0, T, dt, Vreg, kappa, std::max<int>(1, static_cast<int>(T / dt)));
    return norm(phi0.grid, a.states.back() - b.states.back());
}

} // namespace qclt
