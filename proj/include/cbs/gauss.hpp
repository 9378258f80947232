#pragma once

// Gauss-Legendre rules (Newton iteration on Legendre polynomials) and a
// composite helper for integrating over a list of segments.

#include <cmath>
#include <cstddef>
#include <vector>

namespace cbs {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point rule on [-1, 1]
inline QuadRule gauss_legendre(std::size_t n)
{
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
                p0 = p1;
                p1 = p2;
            }
            dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// n-point rule mapped to [a, b]
inline QuadRule gauss_legendre(std::size_t n, double a, double b)
{
    QuadRule rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

template <typename F>
double integrate(const QuadRule& rule, F&& f)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(rule.nodes[i]);
    return sum;
}

} // namespace cbs
