#include "qclt/oracles.hpp"

#include <cmath>

namespace qclt::oracle {

MonomialState monomial_vacuum(const mpq_class& s, int capacity) {
    require(capacity >= 1, "input", "monomial capacity must be positive");
    MonomialState v;
    v.s = s;
    v.c.assign(static_cast<std::size_t>(capacity) + 1, mpq_class(0));
    v.c[0] = 1;
    return v;
}

MonomialState apply_field(const MonomialState& v) {
    MonomialState out;
    out.s = v.s;
    out.c.assign(v.c.size(), mpq_class(0));
    const std::size_t top = v.c.size() - 1;
    for (std::size_t m = 0; m < v.c.size(); ++m) {
        if (v.c[m] == 0) continue;
        require(m < top, "capacity", "monomial ladder capacity exceeded");
        out.c[m + 1] += v.c[m];                       // a*(F)
        if (m >= 1) out.c[m - 1] += mpq_class(static_cast<long>(m)) * v.s * v.c[m]; // a(F)
    }
    for (auto& q : out.c) q.canonicalize();
    return out;
}

std::vector<mpq_class> field_power_brute(int ell, const mpq_class& s) {
    require(ell >= 0, "input", "field_power_brute needs ell >= 0");
    MonomialState v = monomial_vacuum(s, 2 * ell + 1);
    for (int k = 0; k < 2 * ell; ++k) v = apply_field(v);
    std::vector<mpq_class> out(static_cast<std::size_t>(ell) + 1);
    for (int m = 0; m <= ell; ++m) out[static_cast<std::size_t>(m)] = v.c[static_cast<std::size_t>(2 * m)];
    // odd ladder components must vanish identically
    for (std::size_t m = 1; m < v.c.size(); m += 2)
        require(v.c[m] == 0, "numeric", "odd monomial component in an even field power");
    return out;
}

namespace {

std::uint64_t match_recursive(std::uint64_t unmatched_mask, int k) {
    if (unmatched_mask == 0) return 1;
    int first = 0;
    while (!(unmatched_mask & (1ull << first))) ++first;
    std::uint64_t total = 0;
    for (int j = first + 1; j < k; ++j) {
        if (!(unmatched_mask & (1ull << j))) continue;
        total += match_recursive(unmatched_mask & ~(1ull << first) & ~(1ull << j), k);
    }
    return total;
}

} // namespace

std::uint64_t count_pair_partitions(int k) {
    require(k >= 0 && k <= 20, "input", "pair partition enumeration supports k <= 20");
    if (k % 2 == 1) return 0;
    if (k == 0) return 1;
    return match_recursive((1ull << k) - 1, k);
}

double gaussian_moment_quadrature(int k) {
    require(k >= 0, "input", "gaussian_moment_quadrature needs k >= 0");
    // composite Simpson on [-12, 12]; the tail beyond is below 1e-30
    const double a = -12.0, b = 12.0;
    const int n = 48000; // even
    const double h = (b - a) / n;
    auto f = [&](double x) {
        return std::pow(x, k) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    };
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

} // namespace qclt::oracle
