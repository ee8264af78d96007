// 2x2 linear algebra for the continuation schemes. Everything the solvers
// need fits in Cramer's rule and the trace/determinant stability tests.
#pragma once

#include <cmath>
#include <stdexcept>

namespace cascade {

struct Vec2 {
    double v1 = 0.0;
    double v2 = 0.0;
};

struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

// Solves A x = b by Cramer's rule. The caller is responsible for checking
// det(A) against its own singularity threshold first.
inline Vec2 solve(const Mat2& a, const Vec2& b) {
    const double d = a.det();
    if (d == 0.0) throw std::runtime_error("solve: exactly singular 2x2 system");
    return {(b.v1 * a.a22 - a.a12 * b.v2) / d, (a.a11 * b.v2 - b.v1 * a.a21) / d};
}

inline int sign_of(double x) { return x < 0.0 ? -1 : 1; }

// Both eigenvalues in the open left half plane (continuous-time stability).
inline bool eigenvalues_negative(const Mat2& a) {
    return a.trace() < 0.0 && a.det() > 0.0;
}

// Spectral radius of a 2x2 matrix (discrete-time Floquet test).
inline double spectral_radius(const Mat2& a) {
    const double tr = a.trace();
    const double d = a.det();
    const double disc = tr * tr - 4.0 * d;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return std::max(std::abs(0.5 * (tr + root)), std::abs(0.5 * (tr - root)));
    }
    return std::sqrt(d);  // complex pair, |lambda|^2 = det
}

}  // namespace cascade
