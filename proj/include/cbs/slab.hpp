#pragma once

// Slab-reduced radiative transfer: the linear intensity I(z) and the
// two-frequency field g_{w,w'}(z) as fixed points of Fredholm equations with
// the transverse-integrated kernel  prefactor * E1(a |z - z'|).
//
// The log singularity of E1 is handled by product integration: the kernel is
// integrated analytically against a piecewise-linear representation of the
// unknown, so plain iteration converges at the grid's nominal order.

#include <complex>
#include <stdexcept>
#include <vector>

#include "cbs/atom.hpp"
#include "cbs/expint.hpp"
#include "cbs/linalg.hpp"

namespace cbs {

struct SlabGrid {
    double b = 0.0;
    std::vector<double> nodes;   // strictly increasing, nodes[0]=0, nodes[n-1]=b
    std::vector<double> weights; // trapezoid masses, sum to b

    static SlabGrid uniform(double b, std::size_t n = 512)
    {
        if (!(b > 0.0) || n < 2)
            throw std::invalid_argument("SlabGrid: need b > 0 and at least 2 nodes");
        SlabGrid g;
        g.b = b;
        g.nodes.resize(n);
        g.weights.assign(n, 0.0);
        const double h = b / double(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            g.nodes[i] = double(i) * h;
        g.nodes.back() = b;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double hw = 0.5 * (g.nodes[i + 1] - g.nodes[i]);
            g.weights[i] += hw;
            g.weights[i + 1] += hw;
        }
        return g;
    }

    std::size_t size() const { return nodes.size(); }

    void validate() const
    {
        if (nodes.size() < 2 || nodes.size() != weights.size())
            throw std::invalid_argument("SlabGrid: malformed");
        if (nodes.front() != 0.0 || nodes.back() != b)
            throw std::invalid_argument("SlabGrid: nodes must span [0, b]");
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
            if (!(nodes[i + 1] > nodes[i]))
                throw std::invalid_argument("SlabGrid: nodes must increase");
    }

    // integral of a nodal function with the trapezoid masses
    template <typename T>
    T integrate(const std::vector<T>& v) const
    {
        T s{};
        for (std::size_t i = 0; i < v.size(); ++i)
            s += weights[i] * v[i];
        return s;
    }
};

struct IntensityProfile {
    SlabGrid grid;
    std::vector<double> values;
    double rel_path = 1.0; // ell(delta)/ell(reference): ballistic term e^{-z/rel_path}

    double ballistic(double z) const { return std::exp(-z / rel_path); }
};

struct CrossField {
    SlabGrid grid;
    std::vector<cplx> values;
    cplx attenuation{1.0, 0.0}; // source term e^{-attenuation * z}
    cplx prefactor{0.5, 0.0};
};

struct SlabKernelValue {
    cplx value;
    bool singular = false;
};

// Pointwise kernel K(dz) = prefactor * E1(a dz); dz = 0 is an integrable log
// singularity, reported through the flag.
inline SlabKernelValue slab_kernel(double dz, cplx a, cplx prefactor)
{
    if (!(a.real() > 0.0))
        throw std::domain_error("slab_kernel: need Re(a) > 0");
    if (dz < 0.0)
        throw std::domain_error("slab_kernel: need dz >= 0");
    if (dz == 0.0)
        return {{std::numeric_limits<double>::quiet_NaN(), 0.0}, true};
    return {prefactor * expint_e1(a * dz), false};
}

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 10000;
};

struct SolveError : std::runtime_error {
    explicit SolveError(double res)
        : std::runtime_error("slab solver failed to reach tolerance, residual " +
                             std::to_string(res)),
          residual(res)
    {
    }
    double residual;
};

namespace detail {

// Product-integration weights W[i*n+j]: integral of prefactor*E1(a|z_i-z'|)
// against the hat function of node j, exact for piecewise-linear data.
inline std::vector<cplx> kernel_matrix(const SlabGrid& grid, cplx a, cplx prefactor)
{
    grid.validate();
    const std::size_t n = grid.size();
    std::vector<cplx> w(n * n, cplx(0.0));

    // Per element [z_k, z_{k+1}] at distance d from the target node:
    //   A = int E1(a u) du,  B = int u E1(a u) du  over u in [d, d+h].
    const auto accumulate = [&](std::size_t i, std::size_t k, bool element_right_of_i) {
        const double h = grid.nodes[k + 1] - grid.nodes[k];
        const double d = element_right_of_i ? grid.nodes[k] - grid.nodes[i]
                                            : grid.nodes[i] - grid.nodes[k + 1];
        const cplx A = (e1_primitive(a * (d + h)) - e1_primitive(a * d)) / a;
        const cplx B = (t_e1_primitive(a * (d + h)) - t_e1_primitive(a * d)) / (a * a);
        const cplx near_w = ((d + h) * A - B) / h; // node at distance d
        const cplx far_w = (B - d * A) / h;        // node at distance d + h
        if (element_right_of_i) {
            w[i * n + k] += near_w;
            w[i * n + k + 1] += far_w;
        } else {
            w[i * n + k + 1] += near_w;
            w[i * n + k] += far_w;
        }
    };

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k + 1 < n; ++k)
            accumulate(i, k, grid.nodes[k] >= grid.nodes[i]);

    for (auto& v : w)
        v *= prefactor;
    return w;
}

// Uniform-grid fast path: antiderivatives depend on |i-j| only.
inline std::vector<cplx> kernel_matrix_uniform(const SlabGrid& grid, cplx a, cplx prefactor)
{
    const std::size_t n = grid.size();
    const double h = grid.nodes[1] - grid.nodes[0];
    std::vector<cplx> A(n), B(n); // element at cell distance c: u in [c h, (c+1) h]
    for (std::size_t c = 0; c + 1 < n; ++c) {
        A[c] = (e1_primitive(a * ((c + 1) * h)) - e1_primitive(a * (c * h))) / a;
        B[c] = (t_e1_primitive(a * ((c + 1) * h)) - t_e1_primitive(a * (c * h))) / (a * a);
    }
    std::vector<cplx> w(n * n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const bool right = k >= i;
            const std::size_t c = right ? k - i : i - k - 1;
            const double d = double(c) * h;
            const cplx near_w = ((d + h) * A[c] - B[c]) / h;
            const cplx far_w = (B[c] - d * A[c]) / h;
            if (right) {
                w[i * n + k] += near_w;
                w[i * n + k + 1] += far_w;
            } else {
                w[i * n + k + 1] += near_w;
                w[i * n + k] += far_w;
            }
        }
    for (auto& v : w)
        v *= prefactor;
    return w;
}

inline bool is_uniform(const SlabGrid& grid)
{
    const double h = grid.nodes[1] - grid.nodes[0];
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (std::abs(grid.nodes[i + 1] - grid.nodes[i] - h) > 1e-12 * (1.0 + h))
            return false;
    return true;
}

inline std::vector<cplx> build_kernel(const SlabGrid& grid, cplx a, cplx prefactor)
{
    grid.validate();
    return is_uniform(grid) ? kernel_matrix_uniform(grid, a, prefactor)
                            : kernel_matrix(grid, a, prefactor);
}

template <typename T>
void matvec(const std::vector<cplx>& w, const std::vector<T>& x, std::vector<cplx>& out)
{
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        cplx s{};
        const cplx* row = w.data() + i * n;
        for (std::size_t j = 0; j < n; ++j)
            s += row[j] * x[j];
        out[i] = s;
    }
}

// Dense LU fallback for (I - W) g = src when plain iteration diverges.
inline std::vector<cplx> direct_solve(const std::vector<cplx>& w, const std::vector<cplx>& src)
{
    const std::size_t n = src.size();
    std::vector<cplx> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m[i * n + j] = (i == j ? cplx(1.0) : cplx(0.0)) - w[i * n + j];
    std::vector<cplx> rhs = src;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(m[perm[col] * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(m[perm[r] * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        std::swap(perm[col], perm[piv]);
        const cplx diag = m[perm[col] * n + col];
        if (std::abs(diag) == 0.0)
            throw SolveError(std::numeric_limits<double>::infinity());
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = m[perm[r] * n + col] / diag;
            if (f == cplx(0.0))
                continue;
            m[perm[r] * n + col] = f;
            for (std::size_t j = col + 1; j < n; ++j)
                m[perm[r] * n + j] -= f * m[perm[col] * n + j];
            rhs[perm[r]] -= f * rhs[perm[col]];
        }
    }
    std::vector<cplx> out(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx s = rhs[perm[i]];
        for (std::size_t j = i + 1; j < n; ++j)
            s -= m[perm[i] * n + j] * out[j];
        out[i] = s / m[perm[i] * n + i];
    }
    return out;
}

// Fixed point of g = src + W g, iterated from src; falls back to a direct
// solve if the residual stalls or grows.
inline std::vector<cplx> solve_fredholm(const std::vector<cplx>& w,
                                        const std::vector<cplx>& src,
                                        const SolveOptions& opt)
{
    const std::size_t n = src.size();
    std::vector<cplx> g = src, kg(n);
    double prev_res = std::numeric_limits<double>::infinity();
    int bad = 0;
    for (int it = 0; it < opt.max_iter; ++it) {
        matvec(w, g, kg);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx next = src[i] + kg[i];
            res = std::max(res, std::abs(next - g[i]));
            g[i] = next;
        }
        if (res < opt.tol)
            return g;
        bad = res > prev_res ? bad + 1 : 0;
        prev_res = res;
        if (bad >= 3)
            break;
    }
    g = direct_solve(w, src);
    matvec(w, g, kg);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        res = std::max(res, std::abs(src[i] + kg[i] - g[i]));
    if (res > opt.tol * 100.0)
        throw SolveError(res);
    return g;
}

} // namespace detail

// I(z) = e^{-z/rel} + (1/(2 rel)) int_0^b E1(|z-z'|/rel) I(z') dz',
// rel = ell(delta)/ell(delta_ref). The grid lives in units of ell(delta_ref).
inline IntensityProfile solve_intensity(const SlabGrid& grid, Detuning delta,
                                        Detuning delta_ref, SolveOptions opt = {})
{
    const double rel = mean_free_path_ratio(delta_ref, delta);
    const cplx a(1.0 / rel, 0.0);
    const auto w = detail::build_kernel(grid, a, cplx(0.5 / rel, 0.0));
    std::vector<cplx> src(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        src[i] = std::exp(-grid.nodes[i] / rel);
    const auto g = detail::solve_fredholm(w, src, opt);
    IntensityProfile out;
    out.grid = grid;
    out.rel_path = rel;
    out.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.values[i] = g[i].real();
    return out;
}

// g(z) = e^{-a z} + pref int_0^b E1(a |z-z'|) g(z') dz' with
// a = complex_attenuation(delta, delta') and pref chosen so that the elastic
// case delta' = delta reproduces the intensity kernel (1/2) E1(|z-z'|).
inline CrossField solve_cross(const SlabGrid& grid, Detuning delta, Detuning delta_p,
                              SolveOptions opt = {})
{
    const cplx a = complex_attenuation(delta, delta_p);
    const cplx pref = 0.5 * scattering_amplitude(delta) *
                      std::conj(scattering_amplitude(delta_p)) / cross_section(delta);
    const auto w = detail::build_kernel(grid, a, pref);
    std::vector<cplx> src(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        src[i] = std::exp(-a * grid.nodes[i]);
    CrossField out;
    out.grid = grid;
    out.attenuation = a;
    out.prefactor = pref;
    out.values = detail::solve_fredholm(w, src, opt);
    return out;
}

} // namespace cbs
