#pragma once

// Test-side oracles, independent of the implementation paths they check:
//  - E1 by direct numerical quadrature of its integral representation
//  - the transverse-plane Monte-Carlo reduction of |G|^2 to the slab kernel
//  - Neumann path-sum Monte-Carlo of the intensity and two-frequency field
//  - the 3-D form of the nonlinear propagation ladder on solved profiles

#include <cmath>
#include <complex>
#include <vector>

#include "cbs/atom.hpp"
#include "cbs/gauss.hpp"
#include "cbs/rng.hpp"
#include "cbs/slab.hpp"

namespace oracles {

using cbs::cplx;

// E1(z) = int_0^inf e^{-z(1+t)}/(1+t) dt, by composite Gauss-Legendre on a
// geometric ladder of segments. Slow and simple.
inline cplx e1_by_quadrature(cplx z)
{
    const auto rule = cbs::gauss_legendre(64);
    cplx sum = 0.0;
    double lo = 0.0;
    for (int seg = 0; seg < 60; ++seg) {
        const double hi = lo == 0.0 ? 0.5 : lo * 1.6;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double t = mid + half * rule.nodes[i];
            sum += half * rule.weights[i] * std::exp(-z * (1.0 + t)) / (1.0 + t);
        }
        lo = hi;
        if (std::abs(std::exp(-z * (1.0 + lo))) < 1e-300)
            break;
    }
    return sum;
}

// Monte-Carlo integral over the transverse plane of the squared Green pair
// kernel at axial separation dz:  int d^2rho  e^{-a r} / (4 pi r^2),
// r = sqrt(rho^2 + dz^2). Equals (1/2) E1(a dz).
struct McValue {
    double mean = 0, stderr_ = 0;
};

inline McValue transverse_kernel_mc(double dz, double a_real, std::size_t n,
                                    std::uint64_t seed)
{
    cbs::RngStream rng(seed, 0);
    // importance-sample rho with density p(rho) = rho_0^2 rho / (rho_0^2+rho^2)^{3/2} ... use
    // a simple exponential in rho with rate lam and divide by the density.
    const double lam = std::max(0.5, a_real);
    double sum = 0, sum2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = -std::log(rng.uniform_pos()) / lam;
        const double pdf = lam * std::exp(-lam * rho);
        const double r = std::hypot(rho, dz);
        const double f = 2.0 * M_PI * rho * std::exp(-a_real * r) / (4.0 * M_PI * r * r);
        const double v = f / pdf;
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / double(n);
    const double var = std::max(0.0, sum2 / double(n) - mean * mean);
    return {mean, std::sqrt(var / double(n))};
}

// Neumann path-sum estimate of I(z) (and of g_{w,w'}(z)) as histograms of
// scattering-event depths of random walks launched from the illuminated face.
struct PathSumHistogram {
    std::vector<double> centers;
    std::vector<double> mean;
    std::vector<double> stderr_;
};

inline PathSumHistogram path_sum_intensity(double b, std::size_t bins, std::size_t n_paths,
                                           std::uint64_t seed)
{
    const double dz = b / double(bins);
    std::vector<double> acc(bins, 0.0), acc2(bins, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
        cbs::RngStream rng(seed, p);
        std::vector<double> counts(bins, 0.0);
        double z = -std::log(rng.uniform_pos());
        if (z < b) {
            double x = 0, y = 0;
            for (int step = 0; step < 100000; ++step) {
                counts[std::min(bins - 1, std::size_t(z / dz))] += 1.0;
                double ux, uy, uz;
                rng.unit_vector(ux, uy, uz);
                const double r = -std::log(rng.uniform_pos());
                x += r * ux;
                y += r * uy;
                z += r * uz;
                if (z < 0.0 || z > b)
                    break;
            }
        }
        for (std::size_t k = 0; k < bins; ++k) {
            acc[k] += counts[k];
            acc2[k] += counts[k] * counts[k];
        }
    }
    PathSumHistogram h;
    h.centers.resize(bins);
    h.mean.resize(bins);
    h.stderr_.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        h.centers[k] = (double(k) + 0.5) * dz;
        const double m = acc[k] / double(n_paths);
        const double var = std::max(0.0, acc2[k] / double(n_paths) - m * m);
        h.mean[k] = m / dz; // density per unit depth = bin average of I(z)
        h.stderr_[k] = std::sqrt(var / double(n_paths)) / dz;
    }
    return h;
}

// Same walk, complex per-step weights: estimates g_{w,w'}(z). Walk sampled at
// the elastic law; each step of length r carries q e^{-(a-1) r}, the entry
// leg carries e^{-(a-1) z_1}, with q = (1+2i delta)/(1+2i delta').
struct ComplexHistogram {
    std::vector<double> centers;
    std::vector<cplx> mean;
    std::vector<double> stderr_; // of each quadrature component
};

inline ComplexHistogram path_sum_cross(double b, cbs::Detuning delta, cbs::Detuning delta_p,
                                       std::size_t bins, std::size_t n_paths,
                                       std::uint64_t seed)
{
    const cplx a = cbs::complex_attenuation(delta, delta_p);
    const cplx q = cplx(1.0, 2.0 * delta.v) / cplx(1.0, 2.0 * delta_p.v);
    const double dz = b / double(bins);
    std::vector<cplx> acc(bins, cplx(0));
    std::vector<double> acc2re(bins, 0.0), acc2im(bins, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
        cbs::RngStream rng(seed, p);
        std::vector<cplx> counts(bins, cplx(0));
        double z = -std::log(rng.uniform_pos());
        if (z < b) {
            cplx weight = std::exp(-(a - 1.0) * z);
            for (int step = 0; step < 100000; ++step) {
                counts[std::min(bins - 1, std::size_t(z / dz))] += weight;
                double ux, uy, uz;
                rng.unit_vector(ux, uy, uz);
                const double r = -std::log(rng.uniform_pos());
                z += r * uz;
                if (z < 0.0 || z > b)
                    break;
                weight *= q * std::exp(-(a - 1.0) * r);
            }
        }
        for (std::size_t k = 0; k < bins; ++k) {
            acc[k] += counts[k];
            acc2re[k] += counts[k].real() * counts[k].real();
            acc2im[k] += counts[k].imag() * counts[k].imag();
        }
    }
    ComplexHistogram h;
    h.centers.resize(bins);
    h.mean.resize(bins);
    h.stderr_.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        h.centers[k] = (double(k) + 0.5) * dz;
        const cplx m = acc[k] / double(n_paths);
        const double vr = std::max(0.0, acc2re[k] / double(n_paths) - m.real() * m.real());
        const double vi = std::max(0.0, acc2im[k] / double(n_paths) - m.imag() * m.imag());
        h.mean[k] = m / dz;
        h.stderr_[k] = std::sqrt(std::max(vr, vi) / double(n_paths)) / dz;
    }
    return h;
}

// bin average of a piecewise-linear nodal profile, for comparing against the
// histogram oracles
template <typename Values>
auto bin_average(const cbs::SlabGrid& grid, const Values& v, double lo, double hi)
{
    // trapezoid on the fine grid restricted to [lo, hi]
    typename Values::value_type sum{};
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i) {
        const double a = std::max(lo, grid.nodes[i]);
        const double b = std::min(hi, grid.nodes[i + 1]);
        if (b <= a)
            continue;
        const double h = grid.nodes[i + 1] - grid.nodes[i];
        const double ta = (a - grid.nodes[i]) / h, tb = (b - grid.nodes[i]) / h;
        const auto va = v[i] * (1.0 - ta) + v[i + 1] * ta;
        const auto vb = v[i] * (1.0 - tb) + v[i + 1] * tb;
        sum += 0.5 * (va + vb) * (b - a);
        len += b - a;
    }
    return sum / len;
}

// 3-D form of the nonlinear propagation ladder evaluated on a solved profile:
//   int int I(za) I(zb) e^{-|za-zb|} (J(zb)-J(za))/(zb-za) dza dzb
// + int I e^{-z} 2J dz + int I e^{-z} (2J - 1 + e^{-z}) dz,
// with J the cumulative intensity. Independent reduction of the line-averaged
// pump-intensity propagator; no use of the closed slab formula.
inline double prop_ladder_3d(const cbs::IntensityProfile& I)
{
    const std::size_t n = I.values.size();
    std::vector<double> J(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        J[i] = J[i - 1] + 0.5 * (I.values[i] + I.values[i - 1]) *
                              (I.grid.nodes[i] - I.grid.nodes[i - 1]);
    double pair = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const double za = I.grid.nodes[i], zb = I.grid.nodes[j];
            const double k2 = std::exp(-std::abs(za - zb)) * (J[j] - J[i]) / (zb - za);
            pair += I.grid.weights[i] * I.grid.weights[j] * I.values[i] * I.values[j] * k2;
        }
    double ends = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = I.grid.nodes[i];
        ends += I.grid.weights[i] * I.values[i] * std::exp(-z) *
                (2.0 * J[i] + 2.0 * J[i] - 1.0 + std::exp(-z));
    }
    return pair + ends;
}

} // namespace oracles
