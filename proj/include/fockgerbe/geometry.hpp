#pragma once

#include <cmath>

#include "fockgerbe/loop.hpp"
#include "fockgerbe/quaternion.hpp"

namespace fockgerbe {

/// Point (z, y) on S^4 inside H (+) R, with ||z||^2 + y^2 = 1.
struct S4Point {
    Quaternion z;
    double y = 0.0;

    S4Point() : z(Quaternion::one()), y(0.0) {}
    S4Point(const Quaternion& z_, double y_, double tol = 1e-12) : z(z_), y(y_) {
        if (std::abs(z.norm2() + y * y - 1.0) > tol)
            throw NonUnitError("S4Point is off the sphere");
    }

    static S4Point north() { return S4Point(Quaternion{}, 1.0); }
    static S4Point south() { return S4Point(Quaternion{}, -1.0); }
};

/// Homogeneous pair [q0, q1] in HP^1, stored normalized: unit norm in H^2
/// and first nonzero coordinate real positive (right H-scaling fixes both).
struct HP1Point {
    Quaternion q0, q1;

    HP1Point(const Quaternion& a, const Quaternion& b) : q0(a), q1(b) { normalize(); }

    void normalize() {
        const double n = std::sqrt(q0.norm2() + q1.norm2());
        if (n == 0.0) throw ZeroQuaternionError("HP1 point needs a nonzero pair");
        q0 = q0 * (1.0 / n);
        q1 = q1 * (1.0 / n);
        const Quaternion& lead = (q0.norm2() > 1e-24) ? q0 : q1;
        // right-multiply by lead.conj()/||lead|| : makes the lead coordinate real positive
        const Quaternion w = lead.conj() * (1.0 / lead.norm());
        q0 = q0 * w;
        q1 = q1 * w;
    }

    double distance(const HP1Point& other) const {
        const double direct = std::sqrt((q0 - other.q0).norm2() + (q1 - other.q1).norm2());
        return direct;
    }
};

// ---------------------------------------------------------------------------
// stereographic charts
// ---------------------------------------------------------------------------

inline Quaternion stereo_north(const S4Point& p, double tol = 1e-12) {
    if (std::abs(1.0 - p.y) < tol) throw PoleError("stereo_north undefined at the north pole");
    return p.z * (1.0 / (1.0 - p.y));
}

inline Quaternion stereo_south(const S4Point& p, double tol = 1e-12) {
    if (std::abs(1.0 + p.y) < tol) throw PoleError("stereo_south undefined at the south pole");
    return p.z.conj() * (1.0 / (1.0 + p.y));
}

inline S4Point stereo_north_inv(const Quaternion& w) {
    const double n2 = w.norm2();
    const double y = (n2 - 1.0) / (n2 + 1.0);
    return S4Point(w * (1.0 - y), y);
}

inline S4Point stereo_south_inv(const Quaternion& w) {
    const double n2 = w.norm2();
    const double y = (1.0 - n2) / (1.0 + n2);
    return S4Point(w.conj() * (1.0 + y), y);
}

/// S^4 -> HP^1 via [1-y, z] away from the north pole, [conj z, 1+y] away
/// from the south pole; the two branches agree on the overlap.
inline HP1Point theta_s4_to_hp1(const S4Point& p) {
    if (p.y <= 0.0) return HP1Point(Quaternion::one() * (1.0 - p.y), p.z);
    return HP1Point(p.z.conj(), Quaternion::one() * (1.0 + p.y));
}

// ---------------------------------------------------------------------------
// suspension loops and the rotation R_{S^4}
// ---------------------------------------------------------------------------

/// beta_x(s) = (1+x)/2 + cos(s) (1-x)/2 + sin(s) ||(1-x)/2|| N, a loop on S^4
/// through 1 (s=0) and x (s=pi).
inline S4Point beta_point(const Quaternion& x, double s, double unit_tol = 1e-10) {
    if (std::abs(x.norm2() - 1.0) > unit_tol) throw NonUnitError("beta_loop requires unit x");
    const Quaternion half_sum = (Quaternion::one() + x) * 0.5;
    const Quaternion half_diff = (Quaternion::one() - x) * 0.5;
    const Quaternion z = half_sum + std::cos(s) * half_diff;
    const double y = std::sin(s) * half_diff.norm();
    return S4Point(z, y, 1e-9);
}

/// Quarter turn fixing the 1, j, k summands of H and rotating the (i, R)
/// plane: (i,0) -> (0,1) -> (-i,0) -> (0,-1).
inline S4Point rotate_r_s4(const S4Point& p) {
    Quaternion z = p.z;
    const double b = z.b;
    z.b = -p.y;
    return S4Point(z, b, 1e-9);
}

/// Loop s -> beta_x(s) sampled on a power-of-two grid; rows are the five
/// real coordinates (a, b, c, d, y).
inline SampledLoop beta_loop(const Quaternion& x, std::size_t samples) {
    SampledLoop out(5, samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const S4Point p = beta_point(x, out.param(k));
        out.values(0, static_cast<Eigen::Index>(k)) = p.z.a;
        out.values(1, static_cast<Eigen::Index>(k)) = p.z.b;
        out.values(2, static_cast<Eigen::Index>(k)) = p.z.c;
        out.values(3, static_cast<Eigen::Index>(k)) = p.z.d;
        out.values(4, static_cast<Eigen::Index>(k)) = p.y;
    }
    return out;
}

namespace detail {

inline Quaternion theta_tilde_north(const S4Point& p, Quaternion& second) {
    const double den = std::sqrt((1.0 - p.y) * (1.0 - p.y) + p.z.norm2());
    if (den < 1e-14) throw ChartHoleError("theta_tilde_north undefined at the north pole");
    second = p.z * (1.0 / den);
    return Quaternion::one() * ((1.0 - p.y) / den);
}

inline Quaternion theta_tilde_south(const S4Point& p, Quaternion& second) {
    const double den = std::sqrt((1.0 + p.y) * (1.0 + p.y) + p.z.norm2());
    if (den < 1e-14) throw ChartHoleError("theta_tilde_south undefined at the south pole");
    second = Quaternion::one() * ((1.0 + p.y) / den);
    return p.z.conj() * (1.0 / den);
}

} // namespace detail

enum class EtaSide { PlusI, MinusI };

/// Local section eta_{+-i}(x): a loop in S^7 c H^2 lifting theta o R o beta_x.
/// Rows: eight real coordinates (first quaternion then second).
inline SampledLoop eta_section(const Quaternion& x, EtaSide side, std::size_t samples,
                               double hole_tol = 1e-9) {
    const Quaternion hole = (side == EtaSide::PlusI) ? Quaternion::i() : -Quaternion::i();
    if ((x - hole).norm2() < hole_tol * hole_tol)
        throw ChartHoleError("eta_section undefined at its chart hole");
    SampledLoop out(8, samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const S4Point p = rotate_r_s4(beta_point(x, out.param(k)));
        Quaternion w0, w1;
        if (side == EtaSide::PlusI)
            w0 = detail::theta_tilde_north(p, w1);
        else
            w0 = detail::theta_tilde_south(p, w1);
        const auto c0 = w0.coeffs();
        const auto c1 = w1.coeffs();
        for (int r = 0; r < 4; ++r) {
            out.values(r, static_cast<Eigen::Index>(k)) = c0[static_cast<std::size_t>(r)];
            out.values(r + 4, static_cast<Eigen::Index>(k)) = c1[static_cast<std::size_t>(r)];
        }
    }
    return out;
}

/// Transition loop r(x) = rho o pi_H o R o beta_x in S^3, defined for
/// x away from +-i.  For x in S^2 = {pi_i = 0} the normalization rho is
/// trivial on samples.
inline SampledLoop transition_loop_r(const Quaternion& x, std::size_t samples,
                                     double zero_tol = 1e-12) {
    if ((x - Quaternion::i()).norm2() < 1e-18 || (x + Quaternion::i()).norm2() < 1e-18)
        throw ChartHoleError("transition loop undefined at x = +-i");
    SampledLoop out(4, samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const S4Point p = rotate_r_s4(beta_point(x, out.param(k)));
        const double n = p.z.norm();
        if (n < zero_tol)
            throw ZeroQuaternionError("pi_H of the rotated loop vanished at a sample");
        const Quaternion v = p.z * (1.0 / n);
        const auto cf = v.coeffs();
        for (int r = 0; r < 4; ++r)
            out.values(r, static_cast<Eigen::Index>(k)) = cf[static_cast<std::size_t>(r)];
    }
    return out;
}

/// Pointwise quaternion product of two quaternion-valued sampled loops.
inline SampledLoop quaternion_loop_product(const SampledLoop& lhs, const SampledLoop& rhs) {
    if (lhs.dim() != 4 || rhs.dim() != 4 || lhs.samples() != rhs.samples())
        throw Error("quaternion_loop_product expects matching 4-row loops");
    SampledLoop out(4, lhs.samples());
    for (std::size_t k = 0; k < lhs.samples(); ++k) {
        const auto col = [&](const SampledLoop& l, int r) {
            return l.values(r, static_cast<Eigen::Index>(k)).real();
        };
        const Quaternion p(col(lhs, 0), col(lhs, 1), col(lhs, 2), col(lhs, 3));
        const Quaternion q(col(rhs, 0), col(rhs, 1), col(rhs, 2), col(rhs, 3));
        const Quaternion pq = p * q;
        const auto cf = pq.coeffs();
        for (int r = 0; r < 4; ++r)
            out.values(r, static_cast<Eigen::Index>(k)) = cf[static_cast<std::size_t>(r)];
    }
    return out;
}

} // namespace fockgerbe
