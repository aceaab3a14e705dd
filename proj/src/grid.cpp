#include "qclt/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace qclt {

Grid::Grid(int d, int n, double L) : dim(d), points(n), length(L) {
    require(d >= 1, "input", "grid dimension must be positive");
    require(n >= 1, "input", "grid points per axis must be positive");
    require(L > 0.0, "input", "grid length must be positive");
    modes_ = 1;
    for (int a = 0; a < d; ++a) modes_ *= n;
}

double Grid::cell() const { return std::pow(spacing(), dim); }

void Grid::unflatten(Eigen::Index idx, int* out) const {
    for (int a = 0; a < dim; ++a) {
        out[a] = static_cast<int>(idx % points);
        idx /= points;
    }
}

Eigen::Index Grid::flatten(const int* mi) const {
    Eigen::Index idx = 0;
    for (int a = dim - 1; a >= 0; --a) idx = idx * points + mi[a];
    return idx;
}

int Grid::wrap(int delta) const {
    int m = delta % points;
    if (m < 0) m += points;
    return m;
}

double Grid::axis_distance(int i) const {
    int m = wrap(i);
    int d = std::min(m, points - m);
    return d * spacing();
}

double Grid::ksq(Eigen::Index idx) const {
    double s = 0.0;
    int mi[16];
    unflatten(idx, mi);
    for (int a = 0; a < dim; ++a) {
        int m = mi[a];
        if (m > points / 2) m -= points;
        double k = 2.0 * kPi * m / length;
        s += k * k;
    }
    return s;
}

Complex inner(const Grid& g, const VecC& f, const VecC& h) {
    require(f.size() == g.modes() && h.size() == g.modes(), "input-shape",
            "inner product length mismatch");
    return g.cell() * f.dot(h); // Eigen dot conjugates the first argument
}

double inner_real(const Grid& g, const VecC& f, const VecC& h) {
    return inner(g, f, h).real();
}

double norm(const Grid& g, const VecC& f) {
    return std::sqrt(g.cell()) * f.norm();
}

VecC conjugate_J(const VecC& f) { return f.conjugate(); }

namespace {

// FFT along every axis of the flattened d-dimensional array. Plans are
// per-thread (Eigen::FFT objects are stateful).
void fft_all_axes(const Grid& g, VecC& data, bool forward) {
    thread_local Eigen::FFT<double> fft;
    const int n = g.points;
    const Eigen::Index M = g.modes();
    std::vector<Complex> line(n), out(n);
    for (int axis = 0; axis < g.dim; ++axis) {
        Eigen::Index stride = 1;
        for (int a = 0; a < axis; ++a) stride *= n;
        const Eigen::Index nlines = M / n;
        for (Eigen::Index l = 0; l < nlines; ++l) {
            // base index of this line: insert axis coordinate 0
            Eigen::Index low = l % stride;
            Eigen::Index high = l / stride;
            Eigen::Index base = high * stride * n + low;
            for (int i = 0; i < n; ++i) line[i] = data[base + i * stride];
            if (forward)
                fft.fwd(out, line);
            else
                fft.inv(out, line);
            for (int i = 0; i < n; ++i) data[base + i * stride] = out[i];
        }
    }
}

} // namespace

VecC fft_forward(const Grid& g, const VecC& f) {
    require(f.size() == g.modes(), "input-shape", "fft length mismatch");
    VecC out = f;
    fft_all_axes(g, out, true);
    return out;
}

VecC fft_inverse(const Grid& g, const VecC& f) {
    require(f.size() == g.modes(), "input-shape", "fft length mismatch");
    VecC out = f;
    fft_all_axes(g, out, false);
    return out;
}

VecC laplacian_apply(const Grid& g, const VecC& f) {
    require(f.size() == g.modes(), "input-shape", "laplacian length mismatch");
    VecC fh = fft_forward(g, f);
    for (Eigen::Index i = 0; i < fh.size(); ++i) fh[i] *= -g.ksq(i);
    return fft_inverse(g, fh);
}

MatR laplacian_matrix(const Grid& g) {
    // Circulant kernel c(x-y) = (1/M) sum_k (-|k|^2) cos(k.(x-y)); the cosine
    // form keeps the matrix exactly real and symmetric.
    const Eigen::Index M = g.modes();
    const int n = g.points;
    VecR kernel(M);
    std::vector<int> mi(g.dim), mk(g.dim);
    for (Eigen::Index d = 0; d < M; ++d) {
        g.unflatten(d, mi.data());
        double acc = 0.0;
        for (Eigen::Index k = 0; k < M; ++k) {
            g.unflatten(k, mk.data());
            double phase = 0.0;
            for (int a = 0; a < g.dim; ++a)
                phase += 2.0 * kPi * mk[a] * mi[a] / n;
            acc += -g.ksq(k) * std::cos(phase);
        }
        kernel[d] = acc / static_cast<double>(M);
    }
    MatR L(M, M);
    std::vector<int> mx(g.dim), my(g.dim), md(g.dim);
    for (Eigen::Index x = 0; x < M; ++x) {
        g.unflatten(x, mx.data());
        for (Eigen::Index y = 0; y < M; ++y) {
            g.unflatten(y, my.data());
            for (int a = 0; a < g.dim; ++a) md[a] = g.wrap(mx[a] - my[a]);
            L(x, y) = kernel[g.flatten(md.data())];
        }
    }
    return L;
}

PairPotential::PairPotential(const Grid& g, VecR vals) : grid(g), values(std::move(vals)) {
    require(values.size() == grid.modes(), "input-shape", "potential table length mismatch");
    sup = values.cwiseAbs().maxCoeff();
    // evenness under lattice reflection
    std::vector<int> mi(grid.dim), mr(grid.dim);
    const double tol = 1e-12 * (1.0 + sup);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        grid.unflatten(i, mi.data());
        for (int a = 0; a < grid.dim; ++a) mr[a] = grid.wrap(-mi[a]);
        Eigen::Index j = grid.flatten(mr.data());
        require(std::abs(values[i] - values[j]) <= tol, "input",
                "potential is not even under lattice reflection");
    }
}

double PairPotential::at_difference(Eigen::Index i, Eigen::Index j) const {
    std::vector<int> mi(grid.dim), mj(grid.dim), md(grid.dim);
    grid.unflatten(i, mi.data());
    grid.unflatten(j, mj.data());
    for (int a = 0; a < grid.dim; ++a) md[a] = grid.wrap(mi[a] - mj[a]);
    return values[grid.flatten(md.data())];
}

namespace {

// Sample a radial profile at the periodic lattice distance; even by
// construction.
template <typename F>
PairPotential radial_potential(const Grid& g, F&& profile) {
    VecR vals(g.modes());
    std::vector<int> mi(g.dim);
    for (Eigen::Index i = 0; i < g.modes(); ++i) {
        g.unflatten(i, mi.data());
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            double r = g.axis_distance(mi[a]);
            r2 += r * r;
        }
        vals[i] = profile(std::sqrt(r2));
    }
    return PairPotential(g, std::move(vals));
}

} // namespace

PairPotential potential_gaussian(const Grid& g, double amplitude, double width) {
    require(width > 0.0, "input", "gaussian potential width must be positive");
    return radial_potential(g, [&](double r) { return amplitude * std::exp(-0.5 * r * r / (width * width)); });
}

PairPotential potential_soft_coulomb(const Grid& g, double amplitude, double softening) {
    require(softening > 0.0, "input", "soft-coulomb softening must be positive");
    return radial_potential(g, [&](double r) { return amplitude / std::sqrt(r * r + softening * softening); });
}

PairPotential potential_box(const Grid& g, double amplitude, double radius) {
    return radial_potential(g, [&](double r) { return r <= radius ? amplitude : 0.0; });
}

PairPotential potential_table(const Grid& g, VecR values) {
    return PairPotential(g, std::move(values));
}

VecC convolve(const Grid& g, const PairPotential& V, const VecC& rho) {
    require(rho.size() == g.modes() && V.values.size() == g.modes(), "input-shape",
            "convolution length mismatch");
    VecC vh = fft_forward(g, V.values.cast<Complex>());
    VecC rh = fft_forward(g, rho);
    VecC prod = vh.cwiseProduct(rh);
    return g.cell() * fft_inverse(g, prod);
}

WaveFunction::WaveFunction(const Grid& g, VecC vals) : grid(g), values(std::move(vals)) {
    require(values.size() == grid.modes(), "input-shape", "wave function length mismatch");
}

double WaveFunction::norm() const { return qclt::norm(grid, values); }

WaveFunction& WaveFunction::normalize() {
    double n = norm();
    require(n > 0.0, "input", "cannot normalize the zero wave function");
    values /= n;
    return *this;
}

bool WaveFunction::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

} // namespace qclt
