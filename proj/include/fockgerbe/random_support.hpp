#pragma once

#include <random>

#include <Eigen/Dense>

#include "fockgerbe/modes.hpp"
#include "fockgerbe/quaternion.hpp"

namespace fockgerbe {

using Rng = std::mt19937_64;

inline Quaternion random_unit_quaternion(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Quaternion q(g(rng), g(rng), g(rng), g(rng));
    while (q.norm2() < 1e-12) q = Quaternion(g(rng), g(rng), g(rng), g(rng));
    return normalized(q);
}

inline Eigen::VectorXcd random_complex_vector(Rng& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = cdouble(g(rng), g(rng));
    return v;
}

/// random Sigma-fixed (real) vector of the truncation
inline Eigen::VectorXcd random_real_vector(const ModeBasis& basis, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    const Eigen::MatrixXcd r = basis.real_coordinate_frame();
    Eigen::VectorXd x(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) x(i) = g(rng);
    return r * x.cast<cdouble>();
}

/// Cayley transform of a random real antisymmetric generator: an element of
/// the complexified O(V_trunc), commuting with Sigma, at distance ~ eps from
/// the identity.
inline TruncatedOperator random_real_orthogonal(const ModeBasis& basis, Rng& rng,
                                                double eps = 0.2) {
    std::normal_distribution<double> g(0.0, 1.0);
    const int N = basis.dim();
    Eigen::MatrixXd s(N, N);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) s(r, c) = g(rng);
    Eigen::MatrixXd skew = 0.5 * (s - s.transpose());
    skew *= eps / std::max(1.0, skew.norm());
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(N, N);
    const Eigen::MatrixXd o = (id - skew) * (id + skew).inverse();
    const Eigen::MatrixXcd rframe = basis.real_coordinate_frame();
    TruncatedOperator op(basis, rframe * o.cast<cdouble>() * rframe.adjoint());
    op.verify_flags();
    return op;
}

/// Random element of U(V_J): a unitary on L extended Sigma-equivariantly.
inline TruncatedOperator random_uvj(const LagrangianFrame& frame, Rng& rng, double eps = 0.5) {
    std::normal_distribution<double> g(0.0, 1.0);
    const int d = frame.dim();
    Eigen::MatrixXcd x(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) x(r, c) = cdouble(g(rng), g(rng));
    Eigen::MatrixXcd skew = 0.5 * (x - x.adjoint());
    skew *= eps / std::max(1.0, skew.norm());
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd u = (id - skew) * (id + skew).inverse();
    const Eigen::MatrixXcd f = frame.columns;
    const Eigen::MatrixXcd fbar = frame.conjugate_columns();
    TruncatedOperator op(frame.basis,
                         f * u * f.adjoint() + fbar * u.conjugate() * fbar.adjoint());
    op.verify_flags();
    return op;
}

/// Random element of Sym(Sigma(L)) with Hilbert-Schmidt norm <= scale.
inline Eigen::MatrixXcd random_sym_sigma_l(const LagrangianFrame& frame, Rng& rng,
                                           double scale = 0.3) {
    std::normal_distribution<double> g(0.0, 1.0);
    const int d = frame.dim();
    Eigen::MatrixXcd b(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) b(r, c) = cdouble(g(rng), g(rng));
    Eigen::MatrixXcd anti = 0.5 * (b - b.transpose()); // maps Sigma(L) -> L
    anti *= scale / std::max(scale, anti.norm());
    const Eigen::MatrixXcd f = frame.columns;
    const Eigen::MatrixXcd fbar = frame.conjugate_columns();
    // Z = F anti Fbar^* extended Sigma-equivariantly; antisymmetry of `anti`
    // makes Z skew-adjoint
    return f * anti * fbar.adjoint() + fbar * anti.conjugate() * f.adjoint();
}

} // namespace fockgerbe
