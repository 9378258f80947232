#pragma once

// Polarization algebra of two-photon scattering: transverse projection and
// the ladder/crossed traces over the undetected photon, plus the propagation
// variants with their correlated-average rules.

#include <complex>

#include "cbs/linalg.hpp"

namespace cbs {

// projection of a polarization vector onto the plane perpendicular to a unit
// propagation direction; idempotent
inline CVec3 project(const CVec3& eps, const Vec3& dir)
{
    const cplx along = eps.x * dir.x + eps.y * dir.y + eps.z * dir.z;
    return {eps.x - along * dir.x, eps.y - along * dir.y, eps.z - along * dir.z};
}

// ladder trace over the undetected photon:
// (1/4) [ |e1|^2 |e2.e3*|^2 + |e2|^2 |e1.e3*|^2 + 2 Re{(e1.e2*)(e2.e3*)(e3.e1*)} ]
// The norm factors matter: the chain vectors fed in are projected and not
// renormalized, and the trace sum over the undetected basis yields |e|^2.
inline double pi_ladder(const CVec3& e1, const CVec3& e2, const CVec3& e3)
{
    const cplx d23 = dot_conj(e2, e3);
    const cplx d13 = dot_conj(e1, e3);
    const cplx d12 = dot_conj(e1, e2);
    return 0.25 * (e1.norm2() * std::norm(d23) + e2.norm2() * std::norm(d13) +
                   2.0 * (d12 * d23 * std::conj(d13)).real());
}

// crossed trace (four terms, first carries |e1|^2); real part is the signal
inline cplx pi_crossed(const CVec3& e1, const CVec3& e2, const CVec3& te3, const CVec3& e3,
                       const CVec3& te2)
{
    const cplx d23 = dot_conj(e2, e3);
    const cplx d13 = dot_conj(e1, e3);
    const cplx t23 = dot_conj(te2, te3);
    const cplx e1t3 = dot_conj(e1, te3);
    const cplx t2e1 = dot_conj(te2, e1);
    const cplx d2t3 = dot_conj(e2, te3);
    const cplx d21 = dot_conj(e2, e1);
    return 0.25 *
           (e1.norm2() * d23 * t23 + d23 * e1t3 * t2e1 + d13 * d2t3 * t2e1 + d13 * d21 * t23);
}

// propagation ladder trace; e1 and e3 share the nonlinear segment's
// transverse plane, e2 is the pump
inline double pi_prop_ladder(const CVec3& e1, const CVec3& e2, const CVec3& e3)
{
    const cplx d12 = dot_conj(e1, e2);
    const cplx d23 = dot_conj(e2, e3);
    const cplx d31 = dot_conj(e3, e1);
    const cplx d13 = dot_conj(e1, e3);
    return 0.5 * (d12 * d23 * d31 + d13 * e2.norm2() * d31).real();
}

// propagation crossed trace (reversed photon passes the nonlinear vertex)
inline double pi_prop_crossed(const CVec3& e1, const CVec3& e2, const CVec3& e3,
                              const CVec3& te2, const CVec3& te3)
{
    const cplx d12 = dot_conj(e1, e2);
    const cplx t32 = dot_conj(te3, te2);
    const cplx d31 = dot_conj(e3, e1);
    const cplx e1t2 = dot_conj(e1, te2);
    const cplx t3e2 = dot_conj(te3, e2);
    return 0.5 * (d12 * t32 * d31 + e1t2 * t3e2 * d31).real();
}

// circular laser polarization and the helicity-preserving detector
inline CVec3 helicity_laser() { return {cplx(M_SQRT1_2, 0), cplx(0, M_SQRT1_2), cplx(0, 0)}; }
inline CVec3 helicity_detector() { return helicity_laser().conj(); }

} // namespace cbs
