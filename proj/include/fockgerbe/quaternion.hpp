#pragma once

#include <array>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "fockgerbe/errors.hpp"

namespace fockgerbe {

/// A quaternion a + b i + c j + d k over the reals.
///
/// Multiplication follows i^2 = j^2 = k^2 = ijk = -1.  Values are plain
/// aggregates; every operation returns a fresh value.
struct Quaternion {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double a_, double b_, double c_, double d_)
        : a(a_), b(b_), c(c_), d(d_) {}

    static constexpr Quaternion one() { return {1, 0, 0, 0}; }
    static constexpr Quaternion i() { return {0, 1, 0, 0}; }
    static constexpr Quaternion j() { return {0, 0, 1, 0}; }
    static constexpr Quaternion k() { return {0, 0, 0, 1}; }

    double norm2() const { return a * a + b * b + c * c + d * d; }
    double norm() const { return std::sqrt(norm2()); }

    Quaternion conj() const { return {a, -b, -c, -d}; }

    Quaternion inverse() const {
        const double n2 = norm2();
        if (n2 == 0.0) throw ZeroQuaternionError("inverse of zero quaternion");
        return {a / n2, -b / n2, -c / n2, -d / n2};
    }

    Quaternion operator+(const Quaternion& q) const { return {a + q.a, b + q.b, c + q.c, d + q.d}; }
    Quaternion operator-(const Quaternion& q) const { return {a - q.a, b - q.b, c - q.c, d - q.d}; }
    Quaternion operator-() const { return {-a, -b, -c, -d}; }
    Quaternion operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    friend Quaternion operator*(double s, const Quaternion& q) { return q * s; }

    Quaternion operator*(const Quaternion& q) const {
        return {a * q.a - b * q.b - c * q.c - d * q.d,
                a * q.b + b * q.a + c * q.d - d * q.c,
                a * q.c - b * q.d + c * q.a + d * q.b,
                a * q.d + b * q.c - c * q.b + d * q.a};
    }

    std::array<double, 4> coeffs() const { return {a, b, c, d}; }

    friend std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
        return os << "(" << q.a << " + " << q.b << "i + " << q.c << "j + " << q.d << "k)";
    }
};

inline double dot(const Quaternion& p, const Quaternion& q) {
    return p.a * q.a + p.b * q.b + p.c * q.c + p.d * q.d;
}

inline Quaternion normalized(const Quaternion& q) {
    const double n = q.norm();
    if (n == 0.0) throw ZeroQuaternionError("normalize zero quaternion");
    return q * (1.0 / n);
}

/// Left multiplication by a unit quaternion as a matrix on R^4 = H with
/// basis (1, i, j, k).  This is a group homomorphism into SO(4).
inline Eigen::Matrix4d so4_of_quat(const Quaternion& u, double unit_tol = 1e-10) {
    if (std::abs(u.norm2() - 1.0) > unit_tol)
        throw NonUnitError("so4_of_quat requires a unit quaternion");
    Eigen::Matrix4d m;
    const Quaternion cols[4] = {u * Quaternion::one(), u * Quaternion::i(),
                                u * Quaternion::j(), u * Quaternion::k()};
    for (int c = 0; c < 4; ++c) {
        const auto cf = cols[c].coeffs();
        for (int r = 0; r < 4; ++r) m(r, c) = cf[static_cast<std::size_t>(r)];
    }
    return m;
}

} // namespace fockgerbe
