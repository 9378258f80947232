#pragma once

// Scalar bistatic components of the backscattering signal, by quadrature on
// solved slab profiles. Nonlinear components are stored per unit saturation;
// gamma_L and gamma_C are the normalized first-order slopes and eta the
// enhancement factor.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cbs/atom.hpp"
#include "cbs/gauss.hpp"
#include "cbs/slab.hpp"

namespace cbs {

struct BistaticErrors {
    double L_el_1 = 0, C_el_1 = 0;
    double L_el_2_scatt = 0, C_el_2_scatt = 0;
    double L_in_2 = 0, C_in_2 = 0;
    double L_el_2_prop = 0, C_el_2_prop = 0;
    double gamma_L = 0, gamma_C = 0;
    double eta_linear = 0, eta_slope = 0;
};

struct BistaticBreakdown {
    // linear
    double L_el_1 = 0, C_el_1 = 0, S_el_1 = 0;
    // nonlinear, per unit s
    double L_el_2_scatt = 0, C_el_2_scatt = 0;
    double L_in_2 = 0, C_in_2 = 0;
    double L_el_2_prop = 0, C_el_2_prop = 0;
    // normalized slopes and enhancement
    double gamma_L = 0, gamma_C = 0;
    double eta_linear = 0, eta_slope = 0;

    std::optional<BistaticErrors> mc_errors;

    double gamma_L_elastic() const { return (L_el_2_scatt + L_el_2_prop) / L_el_1; }
    double gamma_C_elastic() const { return (C_el_2_scatt + C_el_2_prop) / C_el_1; }
    double gamma_L_inelastic() const { return L_in_2 / L_el_1; }
    double gamma_C_inelastic() const { return C_in_2 / C_el_1; }

    void finalize_gammas()
    {
        gamma_L = (L_el_2_scatt + L_el_2_prop + L_in_2) / L_el_1;
        gamma_C = (C_el_2_scatt + C_el_2_prop + C_in_2) / C_el_1;
        eta_linear = 2.0 - S_el_1 / L_el_1;
        eta_slope = (eta_linear - 1.0) * (gamma_C - gamma_L);
    }

    double eta(double s) const { return eta_linear + eta_slope * s; }
};

// ---------------------------------------------------------------------------
// linear components

// L_el^(1) = int_0^b I(z) e^{-z} dz
inline double linear_ladder(const IntensityProfile& I)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < I.values.size(); ++i)
        sum += I.grid.weights[i] * I.values[i] * std::exp(-I.grid.nodes[i]);
    return sum;
}

// single scattering, closed form
inline double single_scattering(double b) { return 0.5 * (1.0 - std::exp(-2.0 * b)); }

struct LinearCrossed {
    double crossed;
    double single;
};

// C_el^(1) = int (I - e^{-z}) e^{-z} dz = L_el^(1) - S_el^(1). The single
// scattering term is quadratured on the same grid so the identity holds to
// round-off; single_scattering(b) is its closed form.
inline LinearCrossed linear_crossed(const IntensityProfile& I)
{
    double crossed = 0.0, single = 0.0;
    for (std::size_t i = 0; i < I.values.size(); ++i) {
        const double ball = std::exp(-I.grid.nodes[i]);
        crossed += I.grid.weights[i] * (I.values[i] - ball) * ball;
        single += I.grid.weights[i] * ball * ball;
    }
    return {crossed, single};
}

// ---------------------------------------------------------------------------
// spectral table: profiles of the inelastic photon on a composite
// Gauss-Legendre grid over the two-peak spectrum

struct SpectralTable {
    Detuning delta;
    std::vector<double> delta_p;       // quadrature nodes
    std::vector<double> pweight;       // P(delta') * GL weight
    std::vector<IntensityProfile> intensity; // I_{w'} per node
    std::vector<CrossField> cross;           // g_{w,w'} per node
    std::vector<double> rel;                 // ell/ell' per node
};

// Peak regions [delta-8, delta+8] split at the peak centers 0 and 2 delta get
// 129 nodes per segment; the flanks out to +-50 get 65. Beyond that the
// remaining spectral mass is ~1e-5 and is dropped.
inline std::vector<QuadRule> spectral_segments(Detuning d)
{
    const double delta = d.v;
    std::vector<double> cuts{delta - 50.0, delta - 8.0, delta + 8.0, delta + 50.0};
    for (double peak : {0.0, 2.0 * delta})
        if (peak > delta - 8.0 && peak < delta + 8.0)
            cuts.push_back(peak);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());
    std::vector<QuadRule> segs;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const bool peak_region = cuts[i] >= delta - 8.0 - 1e-9 && cuts[i + 1] <= delta + 8.0 + 1e-9;
        segs.push_back(gauss_legendre(peak_region ? 129 : 65, cuts[i], cuts[i + 1]));
    }
    return segs;
}

inline SpectralTable build_spectral_table(const SlabGrid& grid, Detuning delta,
                                          SolveOptions opt = {})
{
    SpectralTable t;
    t.delta = delta;
    for (const auto& seg : spectral_segments(delta))
        for (std::size_t k = 0; k < seg.nodes.size(); ++k) {
            const Detuning dp{seg.nodes[k]};
            t.delta_p.push_back(dp.v);
            t.pweight.push_back(seg.weights[k] * inelastic_spectrum(delta, dp));
            t.intensity.push_back(solve_intensity(grid, dp, delta, opt));
            t.cross.push_back(solve_cross(grid, delta, dp, opt));
            t.rel.push_back(mean_free_path_ratio(dp, delta));
        }
    return t;
}

// ---------------------------------------------------------------------------
// nonlinear scattering components (per unit s)

// spectral density of the inelastic ladder at one final detuning:
// int dz (2 I^2 - e^{-2z}) I_{w'}(z)
inline double nl_ladder_density(const IntensityProfile& I, const IntensityProfile& Ip)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < I.values.size(); ++i) {
        const double z = I.grid.nodes[i];
        const double pump = 2.0 * I.values[i] * I.values[i] - std::exp(-2.0 * z);
        sum += I.grid.weights[i] * pump * Ip.values[i];
    }
    return sum;
}

inline double nl_ladder_inelastic(const IntensityProfile& I, const SpectralTable& t)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < t.delta_p.size(); ++k)
        sum += t.pweight[k] * nl_ladder_density(I, t.intensity[k]);
    return sum;
}

// L_el^(2,scatt) = -2 int dz (2 I^2 - e^{-2z}) I
inline double nl_ladder_elastic_scatt(const IntensityProfile& I)
{
    return -2.0 * nl_ladder_density(I, I);
}

// spectral density of the inelastic crossed component at one final detuning:
// 4 int dz [ I |g|^2 - e^{-z} Re(e^{-a z} g*) - (I - e^{-z}) e^{-z(1+ell/ell')} ]
inline double nl_crossed_density(const IntensityProfile& I, const CrossField& g, double rel)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < I.values.size(); ++i) {
        const double z = I.grid.nodes[i];
        const double ball = std::exp(-z);
        const cplx gz = g.values[i];
        const double term1 = I.values[i] * std::norm(gz);
        const double term2 = ball * (std::exp(-g.attenuation * z) * std::conj(gz)).real();
        const double term3 = (I.values[i] - ball) * std::exp(-z * (1.0 + rel));
        sum += I.grid.weights[i] * (term1 - term2 - term3);
    }
    return 4.0 * sum;
}

inline double nl_crossed_inelastic(const IntensityProfile& I, const SpectralTable& t)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < t.delta_p.size(); ++k)
        sum += t.pweight[k] * nl_crossed_density(I, t.cross[k], t.rel[k]);
    return sum;
}

// C_el^(2,scatt) = -8 int dz (I^3 - 2 I e^{-2z} + e^{-3z})
inline double nl_crossed_elastic_scatt(const IntensityProfile& I)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < I.values.size(); ++i) {
        const double z = I.grid.nodes[i];
        const double v = I.values[i];
        sum += I.grid.weights[i] *
               (v * v * v - 2.0 * v * std::exp(-2.0 * z) + std::exp(-3.0 * z));
    }
    return -8.0 * sum;
}

// ---------------------------------------------------------------------------
// nonlinear propagation components (per unit s)

// L_el^(2,prop) = int_0^b I(z) (2 I(z)^2 - 2 I(b)^2 + e^{-2z} - e^{-z}) dz
inline double nl_ladder_prop(const IntensityProfile& I)
{
    const double Ib = I.values.back();
    double sum = 0.0;
    for (std::size_t i = 0; i < I.values.size(); ++i) {
        const double z = I.grid.nodes[i];
        const double v = I.values[i];
        sum += I.grid.weights[i] *
               v * (2.0 * v * v - 2.0 * Ib * Ib + std::exp(-2.0 * z) - std::exp(-z));
    }
    return sum;
}

// C_el^(2,prop) = 2 L_el^(2,prop) - 3 int I (e^{-z} - e^{-2b}) dz
//                 + 1/2 - (3/2) e^{-2b} + e^{-3b}
inline double nl_crossed_prop(const IntensityProfile& I)
{
    const double b = I.grid.b;
    double mid = 0.0;
    for (std::size_t i = 0; i < I.values.size(); ++i)
        mid += I.grid.weights[i] * I.values[i] *
               (std::exp(-I.grid.nodes[i]) - std::exp(-2.0 * b));
    return 2.0 * nl_ladder_prop(I) - 3.0 * mid + 0.5 - 1.5 * std::exp(-2.0 * b) +
           std::exp(-3.0 * b);
}

// cumulative intensity J(z) = int_0^z I, trapezoid on the grid
inline std::vector<double> cumulative_intensity(const IntensityProfile& I)
{
    std::vector<double> J(I.values.size(), 0.0);
    for (std::size_t i = 1; i < I.values.size(); ++i)
        J[i] = J[i - 1] + 0.5 * (I.values[i] + I.values[i - 1]) *
                              (I.grid.nodes[i] - I.grid.nodes[i - 1]);
    return J;
}

// Singly-scattered part of the propagation ladder: the probe scatters once at
// depth z, the nonlinearity sits on its vertical in/out segments:
// int e^{-2z} (4 J(z) - 1 + e^{-z}) dz.
inline double nl_prop_single_scattering(const IntensityProfile& I)
{
    const auto J = cumulative_intensity(I);
    double sum = 0.0;
    for (std::size_t i = 0; i < I.values.size(); ++i) {
        const double z = I.grid.nodes[i];
        sum += I.grid.weights[i] * std::exp(-2.0 * z) * (4.0 * J[i] - 1.0 + std::exp(-z));
    }
    return sum;
}

// Crossed propagation diagrams in which the reversed photon does not pass
// through the nonlinear vertex: the ladder minus its single-scattering part.
inline double nl_crossed_prop_reciprocal(const IntensityProfile& I)
{
    return nl_ladder_prop(I) - nl_prop_single_scattering(I);
}

// ---------------------------------------------------------------------------
// assembly

inline BistaticBreakdown assemble(const MediumParams& params, const SlabGrid& grid,
                                  SolveOptions opt = {})
{
    params.validate();
    BistaticBreakdown out;
    const auto I = solve_intensity(grid, params.detuning, params.detuning, opt);
    const auto table = build_spectral_table(grid, params.detuning, opt);
    out.L_el_1 = linear_ladder(I);
    const auto lc = linear_crossed(I);
    out.C_el_1 = lc.crossed;
    out.S_el_1 = lc.single;
    out.L_el_2_scatt = nl_ladder_elastic_scatt(I);
    out.C_el_2_scatt = nl_crossed_elastic_scatt(I);
    out.L_in_2 = nl_ladder_inelastic(I, table);
    out.C_in_2 = nl_crossed_inelastic(I, table);
    out.L_el_2_prop = nl_ladder_prop(I);
    out.C_el_2_prop = nl_crossed_prop(I);
    out.finalize_gammas();
    return out;
}

// ---------------------------------------------------------------------------
// spectral enhancement curve

struct SpectralCurve {
    std::vector<double> delta_p;
    std::vector<double> ladder_density;  // P(delta') * per-frequency ladder
    std::vector<double> crossed_density; // P(delta') * per-frequency crossed
    std::vector<double> eta;             // 1 + crossed/ladder (P cancels); NaN if undefined
};

inline SpectralCurve spectral_enhancement(const MediumParams& params, const SlabGrid& grid,
                                          const std::vector<double>& delta_p,
                                          SolveOptions opt = {})
{
    params.validate();
    SpectralCurve curve;
    const auto I = solve_intensity(grid, params.detuning, params.detuning, opt);
    for (double dpv : delta_p) {
        if (dpv == params.detuning.v)
            throw std::invalid_argument(
                "spectral_enhancement: the elastic peak delta' = delta must be excluded");
        const Detuning dp{dpv};
        const auto Ip = solve_intensity(grid, dp, params.detuning, opt);
        const auto g = solve_cross(grid, params.detuning, dp, opt);
        const double rel = mean_free_path_ratio(dp, params.detuning);
        const double p = inelastic_spectrum(params.detuning, dp);
        const double ladder = nl_ladder_density(I, Ip);
        const double crossed = nl_crossed_density(I, g, rel);
        curve.delta_p.push_back(dpv);
        curve.ladder_density.push_back(p * ladder);
        curve.crossed_density.push_back(p * crossed);
        curve.eta.push_back(ladder > 0.0 ? 1.0 + crossed / ladder
                                         : std::numeric_limits<double>::quiet_NaN());
    }
    return curve;
}

} // namespace cbs
