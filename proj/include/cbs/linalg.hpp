#pragma once

// Minimal fixed-size vectors/matrices for the polarization bookkeeping:
// real directions, complex polarization 3-vectors, and real 3x3 projector
// products.

#include <array>
#include <cmath>
#include <complex>

namespace cbs {

using cplx = std::complex<double>;

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

struct CVec3 {
    cplx x{}, y{}, z{};

    CVec3() = default;
    CVec3(cplx a, cplx b, cplx c) : x(a), y(b), z(c) {}

    CVec3 operator+(const CVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    CVec3 operator-(const CVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    CVec3 operator*(cplx s) const { return {x * s, y * s, z * s}; }
    CVec3 conj() const { return {std::conj(x), std::conj(y), std::conj(z)}; }

    // plain bilinear contraction a.b (no conjugation)
    cplx dot(const CVec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return std::norm(x) + std::norm(y) + std::norm(z); }
};

// a . b* — the contraction used throughout the polarization traces
inline cplx dot_conj(const CVec3& a, const CVec3& b) { return a.dot(b.conj()); }

// Row-major real 3x3, enough for products of transverse projectors.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return {}; }

    // projector onto the plane perpendicular to unit vector d
    static Mat3 projector(const Vec3& d)
    {
        Mat3 p;
        const double c[3] = {d.x, d.y, d.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                p.m[3 * i + j] = (i == j ? 1.0 : 0.0) - c[i] * c[j];
        return p;
    }

    Mat3 operator*(const Mat3& o) const
    {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k)
                    s += m[3 * i + k] * o.m[3 * k + j];
                r.m[3 * i + j] = s;
            }
        return r;
    }

    CVec3 operator*(const CVec3& v) const
    {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 transpose() const
    {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[3 * i + j] = m[3 * j + i];
        return r;
    }
};

} // namespace cbs
