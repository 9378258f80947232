#include <doctest.h>

#include <complex>

#include "cbs/expint.hpp"
#include "cbs/gauss.hpp"
#include "oracles.hpp"

using cbs::cplx;

TEST_SUITE_BEGIN("expint");

TEST_CASE("real E1 against tabulated values")
{
    CHECK(cbs::expint_e1(0.5) == doctest::Approx(0.55977359477616084).epsilon(1e-13));
    CHECK(cbs::expint_e1(1.0) == doctest::Approx(0.21938393439552026).epsilon(1e-13));
    CHECK(cbs::expint_e1(2.0) == doctest::Approx(0.048900510708061120).epsilon(1e-13));
    CHECK(cbs::expint_e1(5.0) == doctest::Approx(0.0011482955912753257).epsilon(1e-13));
    CHECK(cbs::expint_e1(10.0) == doctest::Approx(4.1569689296853246e-06).epsilon(1e-12));
    CHECK_THROWS_AS(cbs::expint_e1(0.0), std::domain_error);
    CHECK_THROWS_AS(cbs::expint_e1(-1.0), std::domain_error);
}

TEST_CASE("series and continued fraction agree in the overlap annulus")
{
    for (double re : {0.3, 1.0, 2.0})
        for (double im : {-2.0, -0.5, 0.0, 1.0, 2.4}) {
            const cplx z(re, im);
            if (std::abs(z) < 0.3)
                continue;
            const cplx a = cbs::detail::e1_series(z);
            const cplx b = cbs::detail::e1_contfrac(z);
            CHECK(std::abs(a - b) < 1e-11 * (1.0 + std::abs(a)));
        }
}

TEST_CASE("complex E1 against the quadrature oracle")
{
    for (cplx z : {cplx(0.7, 0.2), cplx(1.0, -3.0), cplx(0.51, 3.0), cplx(4.0, 1.0),
                   cplx(0.75, -0.25), cplx(2.0, 8.0)}) {
        const cplx ours = cbs::expint_e1(z);
        const cplx ref = oracles::e1_by_quadrature(z);
        CHECK(std::abs(ours - ref) < 1e-10 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("antiderivatives reproduce segment integrals of E1 and t E1")
{
    const cplx a(0.8, -1.3);
    const double u1 = 0.3, u2 = 1.7;
    const auto rule = cbs::gauss_legendre(80, u1, u2);
    cplx qA = 0.0, qB = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double u = rule.nodes[i];
        qA += rule.weights[i] * cbs::expint_e1(a * u);
        qB += rule.weights[i] * u * cbs::expint_e1(a * u);
    }
    const cplx A = (cbs::e1_primitive(a * u2) - cbs::e1_primitive(a * u1)) / a;
    const cplx B = (cbs::t_e1_primitive(a * u2) - cbs::t_e1_primitive(a * u1)) / (a * a);
    CHECK(std::abs(A - qA) < 1e-12);
    CHECK(std::abs(B - qB) < 1e-12);

    // limits at 0 absorb the log singularity
    CHECK(cbs::e1_primitive(cplx(0.0)) == cplx(-1.0, 0.0));
    CHECK(cbs::t_e1_primitive(cplx(0.0)) == cplx(-0.5, 0.0));
}

TEST_SUITE_END();
