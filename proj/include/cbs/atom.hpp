#pragma once

// Two-level-atom optics in dimensionless form: detunings in linewidths,
// lengths in laser mean free paths. Covers the one-photon amplitude, cross
// section, complex attenuation of a two-frequency amplitude product, the
// saturation parameter and the one-atom two-photon inelastic spectrum with
// an invertible CDF for sampling.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbs/linalg.hpp"

namespace cbs {

// delta = (omega - omega_at) / Gamma
struct Detuning {
    double v = 0.0;
};

enum class Channel { Scalar, HParallelH };

inline std::string to_string(Channel c)
{
    return c == Channel::Scalar ? "scalar" : "hparh";
}

struct MediumParams {
    Detuning detuning{0.0};
    double b = 1.0;      // optical thickness L / ell(laser)
    double s0 = 0.0;     // on-resonance saturation I0/Is
    Channel channel = Channel::Scalar;
    double klf = 1e3;    // k * ell, diagnostic only

    void validate() const
    {
        if (!(b > 0.0))
            throw std::invalid_argument("MediumParams: optical thickness must be > 0");
        if (!(s0 >= 0.0))
            throw std::invalid_argument("MediumParams: saturation must be >= 0");
        if (!(klf > 1.0))
            throw std::invalid_argument("MediumParams: k*ell must exceed 1");
    }

    bool dilute() const { return klf > 10.0; }
};

// k S_omega / (-4 pi i) = 1 / (1 - 2 i delta)
inline cplx scattering_amplitude(Detuning d)
{
    return 1.0 / cplx(1.0, -2.0 * d.v);
}

// sigma / sigma_0 = 1 / (1 + 4 delta^2)
inline double cross_section(Detuning d)
{
    return 1.0 / (1.0 + 4.0 * d.v * d.v);
}

// ell(to) / ell(from)
inline double mean_free_path_ratio(Detuning from, Detuning to)
{
    return (1.0 + 4.0 * to.v * to.v) / (1.0 + 4.0 * from.v * from.v);
}

// a = -i k (n_w - n*_w') in units of 1/ell(w):
//     a = (1 + ell/ell')/2 + i (delta - delta' ell/ell').
// Pure attenuation a = 1 in the elastic case.
inline cplx complex_attenuation(Detuning d, Detuning dp)
{
    const double rel = mean_free_path_ratio(dp, d); // ell/ell'
    return {0.5 * (1.0 + rel), d.v - dp.v * rel};
}

inline double saturation(Detuning d, double s0)
{
    if (s0 < 0.0)
        throw std::invalid_argument("saturation: s0 must be >= 0");
    return s0 * cross_section(d);
}

// P(delta') * Gamma: two-peak spectrum of the undetected photon, unit norm.
inline double inelastic_spectrum(Detuning d, Detuning dp)
{
    const cplx one_over_peak1 = 1.0 / cplx(dp.v, 0.5);
    const cplx one_over_peak2 = 1.0 / cplx(2.0 * d.v - dp.v, 0.5);
    return std::norm(one_over_peak1 + one_over_peak2) / (4.0 * M_PI);
}

// Closed-form CDF of the spectrum; the cross term has a removable
// singularity at delta = 0 handled with log1p.
inline double spectrum_cdf(Detuning d, double x)
{
    const double delta = d.v;
    double cross;
    if (delta == 0.0) {
        cross = 2.0 * x / (x * x + 0.25);
    } else if (std::abs(delta) < 0.05) {
        const double t = 4.0 * delta * (delta - x) / (x * x + 0.25);
        cross = -std::log1p(t) / (2.0 * delta);
    } else {
        cross = std::log((x * x + 0.25) / ((x - 2.0 * delta) * (x - 2.0 * delta) + 0.25)) /
                (2.0 * delta);
    }
    const double arctans = 2.0 * std::atan(2.0 * x) + 2.0 * std::atan(2.0 * (x - 2.0 * delta));
    return 0.5 + (arctans + cross) / (4.0 * M_PI);
}

// Inverse-CDF sampler: CDF tabulated on 4096 nodes over [delta-25, delta+25]
// with monotone cubic interpolation; the tails are inverted on the analytic
// CDF by bisection. Immutable after construction.
class SpectrumSampler {
public:
    static constexpr std::size_t table_size = 4096;
    static constexpr double half_range = 25.0;

    explicit SpectrumSampler(Detuning d) : delta_(d)
    {
        const double lo = d.v - half_range, hi = d.v + half_range;
        x_.resize(table_size);
        f_.resize(table_size);
        h_ = (hi - lo) / double(table_size - 1);
        for (std::size_t k = 0; k < table_size; ++k) {
            x_[k] = lo + double(k) * h_;
            f_[k] = spectrum_cdf(d, x_[k]);
        }
        build_slopes();
    }

    Detuning delta() const { return delta_; }

    // u in [0,1) -> delta' distributed as the inelastic spectrum
    Detuning sample(double u) const
    {
        if (!(u >= 0.0 && u < 1.0))
            throw std::domain_error("SpectrumSampler::sample: u outside [0,1)");
        if (u < f_.front())
            return Detuning{invert_analytic(u, delta_.v - 1e7, x_.front())};
        if (u >= f_.back())
            return Detuning{invert_analytic(u, x_.back(), delta_.v + 1e7)};
        return Detuning{invert_table(u)};
    }

private:
    void build_slopes()
    {
        const std::size_t n = table_size;
        std::vector<double> sec(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k)
            sec[k] = (f_[k + 1] - f_[k]) / h_;
        slope_.resize(n);
        slope_.front() = std::max(0.0, sec.front());
        slope_.back() = std::max(0.0, sec.back());
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (sec[k - 1] <= 0.0 || sec[k] <= 0.0)
                slope_[k] = 0.0;
            else
                slope_[k] = 2.0 / (1.0 / sec[k - 1] + 1.0 / sec[k]);
        }
    }

    double hermite(std::size_t cell, double t) const
    {
        const double f0 = f_[cell], f1 = f_[cell + 1];
        const double m0 = slope_[cell] * h_, m1 = slope_[cell + 1] * h_;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * m1;
    }

    double hermite_deriv(std::size_t cell, double t) const
    {
        const double f0 = f_[cell], f1 = f_[cell + 1];
        const double m0 = slope_[cell] * h_, m1 = slope_[cell + 1] * h_;
        const double t2 = t * t;
        return (6 * t2 - 6 * t) * f0 + (3 * t2 - 4 * t + 1) * m0 +
               (-6 * t2 + 6 * t) * f1 + (3 * t2 - 2 * t) * m1;
    }

    double invert_table(double u) const
    {
        std::size_t lo = 0, hi = table_size - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (f_[mid] <= u ? lo : hi) = mid;
        }
        double a = 0.0, b = 1.0, t = 0.5;
        for (int it = 0; it < 60; ++it) {
            const double val = hermite(lo, t) - u;
            (val < 0.0 ? a : b) = t;
            const double dv = hermite_deriv(lo, t);
            double tn = dv > 0.0 ? t - val / dv : 0.5 * (a + b);
            if (!(tn > a && tn < b))
                tn = 0.5 * (a + b);
            if (std::abs(tn - t) < 1e-15) {
                t = tn;
                break;
            }
            t = tn;
        }
        return x_[lo] + t * h_;
    }

    double invert_analytic(double u, double a, double b) const
    {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            (spectrum_cdf(delta_, mid) <= u ? a : b) = mid;
            if (b - a < 1e-12 * (1.0 + std::abs(a)))
                break;
        }
        return 0.5 * (a + b);
    }

    Detuning delta_;
    double h_ = 0.0;
    std::vector<double> x_, f_, slope_;
};

} // namespace cbs
