#pragma once

// Minimal quaternion algebra over <1, i, j> plus k, used to package the
// monogenic response per pixel and to state its algebraic invariants.

#include <cmath>
#include <stdexcept>

#include "monolayer/spectral.hpp"

namespace monolayer {

struct Quaternion {
    double a = 0.0;  // real
    double b = 0.0;  // i
    double c = 0.0;  // j
    double d = 0.0;  // k

    bool operator==(const Quaternion&) const = default;
};

inline Quaternion qadd(const Quaternion& p, const Quaternion& q) {
    return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d};
}

inline Quaternion qscale(double t, const Quaternion& q) {
    return {t * q.a, t * q.b, t * q.c, t * q.d};
}

// Hamilton product: i^2 = j^2 = k^2 = ijk = -1.
inline Quaternion qmul(const Quaternion& p, const Quaternion& q) {
    return {p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a};
}

inline Quaternion qconj(const Quaternion& q) { return {q.a, -q.b, -q.c, -q.d}; }

inline double qmod2(const Quaternion& q) {
    return q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d;
}

inline double qmod(const Quaternion& q) { return std::sqrt(qmod2(q)); }

inline Quaternion qinv(const Quaternion& q) {
    const double m2 = qmod2(q);
    if (m2 == 0.0) throw std::domain_error("qinv: zero quaternion");
    return {q.a / m2, -q.b / m2, -q.c / m2, -q.d / m2};
}

// Pixelwise embedding of the monogenic response: I' + i*I1 + j*I2 (k = 0).
inline Quaternion monogenic_quaternion(const MonogenicResponse& m, int y, int x) {
    if (y < 0 || y >= m.i_prime.height || x < 0 || x >= m.i_prime.width)
        throw std::out_of_range("monogenic_quaternion: pixel out of range");
    return {m.i_prime.at(y, x), m.i1.at(y, x), m.i2.at(y, x), 0.0};
}

}  // namespace monolayer
