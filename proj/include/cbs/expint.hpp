#pragma once

// Exponential integral E1 for real and complex arguments with Re(z) >= 0,
// plus the antiderivatives of E1 and t*E1 needed by the product-integration
// quadrature of the slab kernel.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace cbs {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

namespace detail {

// Power series around 0: E1(z) = -gamma - log z + sum_{k>=1} (-1)^{k+1} z^k / (k k!).
// Good for |z| up to a few; mild cancellation only.
template <typename T>
T e1_series(T z)
{
    T sum = T(0);
    T term = T(1);
    for (int k = 1; k < 80; ++k) {
        term *= -z / double(k);
        T inc = -term / double(k);
        sum += inc;
        if (std::abs(inc) < 1e-18 * (std::abs(sum) + 1.0))
            break;
    }
    return -euler_gamma - std::log(z) + sum;
}

// Continued fraction (modified Lentz):
// E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...)))).
template <typename T>
T e1_contfrac(T z)
{
    const double tiny = 1e-300;
    T b = z + 1.0;
    T c = T(1.0 / tiny);
    T d = T(1.0) / b;
    T h = d;
    for (int k = 1; k < 300; ++k) {
        T a = T(-double(k) * double(k));
        b += 2.0;
        d = T(1.0) / (a * d + b);
        c = b + a / c;
        T del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            break;
    }
    return h * std::exp(-z);
}

} // namespace detail

// E1 for real x > 0.
inline double expint_e1(double x)
{
    if (!(x > 0.0))
        throw std::domain_error("expint_e1: argument must be positive");
    return x <= 1.5 ? detail::e1_series(x) : detail::e1_contfrac(x);
}

// E1 for complex z with Re(z) > 0 (the attenuation cone of the slab kernel).
inline std::complex<double> expint_e1(std::complex<double> z)
{
    if (!(z.real() > 0.0) && z.imag() == 0.0)
        throw std::domain_error("expint_e1: need Re(z) > 0");
    return std::abs(z) <= 2.5 ? detail::e1_series(z) : detail::e1_contfrac(z);
}

// Antiderivative of E1:  d/dt [ t E1(t) - e^{-t} ] = E1(t).  Value -1 at t = 0.
inline std::complex<double> e1_primitive(std::complex<double> t)
{
    if (t == std::complex<double>(0.0))
        return {-1.0, 0.0};
    return t * expint_e1(t) - std::exp(-t);
}

// Antiderivative of t E1:  d/dt [ t^2/2 E1(t) - (t+1)/2 e^{-t} ] = t E1(t).
// Value -1/2 at t = 0.
inline std::complex<double> t_e1_primitive(std::complex<double> t)
{
    if (t == std::complex<double>(0.0))
        return {-0.5, 0.0};
    return 0.5 * t * t * expint_e1(t) - 0.5 * (t + 1.0) * std::exp(-t);
}

} // namespace cbs
