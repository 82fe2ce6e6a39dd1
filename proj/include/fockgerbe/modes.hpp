#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fockgerbe/errors.hpp"
#include "fockgerbe/loop.hpp"

namespace fockgerbe {

/// Ordered Fourier-mode basis of the truncation H = C^n (x) span{e^{iqt}, |q| <= Q}.
/// Basis vectors are e_{(q,a)} = ehat_a e^{iqt}, flattened lexicographically in
/// (q, a); the real structure Sigma sends (q, a) -> (-q, a) with coefficient
/// conjugation.
struct ModeBasis {
    int n = 2;      // fiber dimension, even
    int cutoff = 0; // Q

    ModeBasis() = default;
    ModeBasis(int n_, int cutoff_) : n(n_), cutoff(cutoff_) {
        if (n <= 0 || n % 2 != 0) throw Error("fiber dimension must be positive and even");
        if (cutoff < 0) throw Error("cutoff must be nonnegative");
    }

    bool operator==(const ModeBasis& o) const { return n == o.n && cutoff == o.cutoff; }

    int dim() const { return n * (2 * cutoff + 1); }
    int flat(int q, int a) const { return (q + cutoff) * n + a; }
    int freq_of(int idx) const { return idx / n - cutoff; }
    int fiber_of(int idx) const { return idx % n; }

    Eigen::VectorXcd real_structure(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd out(v.size());
        for (int q = -cutoff; q <= cutoff; ++q)
            for (int a = 0; a < n; ++a)
                out(flat(q, a)) = std::conj(v(flat(-q, a)));
        return out;
    }

    /// Sigma M Sigma for a matrix: flip both index frequencies and conjugate.
    Eigen::MatrixXcd sigma_conjugate(const Eigen::MatrixXcd& m) const {
        const int N = dim();
        Eigen::MatrixXcd out(N, N);
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c)
                out(flat(-freq_of(r), fiber_of(r)), flat(-freq_of(c), fiber_of(c))) =
                    std::conj(m(r, c));
        return out;
    }

    /// N x N complex matrix whose columns form a real orthonormal basis of the
    /// Sigma-fixed subspace V_trunc; real-linear maps on V_trunc are R O R^* for
    /// real O.
    Eigen::MatrixXcd real_coordinate_frame() const {
        const int N = dim();
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(N, N);
        int col = 0;
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (int a = 0; a < n; ++a) r(flat(0, a), col++) = 1.0;
        for (int q = 1; q <= cutoff; ++q)
            for (int a = 0; a < n; ++a) {
                r(flat(q, a), col) = inv_sqrt2;
                r(flat(-q, a), col) = inv_sqrt2;
                ++col;
                r(flat(q, a), col) = cdouble(0.0, inv_sqrt2);
                r(flat(-q, a), col) = cdouble(0.0, -inv_sqrt2);
                ++col;
            }
        return r;
    }
};

/// Complex matrix on a ModeBasis with verified structure flags.
struct TruncatedOperator {
    ModeBasis basis;
    Eigen::MatrixXcd mat;
    bool commutes_with_sigma = false;
    bool orthogonal = false;
    double leakage = 0.0; // Fourier mass dropped by windowed truncation

    TruncatedOperator() = default;
    TruncatedOperator(const ModeBasis& b, Eigen::MatrixXcd m) : basis(b), mat(std::move(m)) {}

    double real_defect() const { return (mat - basis.sigma_conjugate(mat)).norm(); }
    double orthogonal_defect() const {
        const int N = basis.dim();
        return (mat.adjoint() * mat - Eigen::MatrixXcd::Identity(N, N)).norm();
    }
    void verify_flags(double tol = 1e-10) {
        commutes_with_sigma = real_defect() < tol;
        orthogonal = orthogonal_defect() < tol;
    }
};

/// Ordered orthonormal frame of an isotropic subspace L of the truncation
/// (a full Lagrangian when d = N/2), with the induced unitary structure
/// J = i on L, -i on Sigma(L).  Partial frames serve block constructions;
/// the unitary structure exists only for full frames.
struct LagrangianFrame {
    ModeBasis basis;
    Eigen::MatrixXcd columns; // N x d, d <= N/2

    LagrangianFrame() = default;
    LagrangianFrame(const ModeBasis& b, Eigen::MatrixXcd cols, double tol = 1e-10)
        : basis(b), columns(std::move(cols)) {
        validate(tol);
    }

    int ambient_dim() const { return basis.dim(); }
    int dim() const { return static_cast<int>(columns.cols()); }

    Eigen::MatrixXcd conjugate_columns() const {
        Eigen::MatrixXcd out(columns.rows(), columns.cols());
        for (int c = 0; c < columns.cols(); ++c)
            out.col(c) = basis.real_structure(columns.col(c));
        return out;
    }

    Eigen::MatrixXcd projector() const { return columns * columns.adjoint(); }

    Eigen::MatrixXcd unitary_structure() const {
        const int N = ambient_dim();
        if (2 * dim() != N)
            throw NotLagrangianError("unitary structure needs a full Lagrangian frame");
        return cdouble(0.0, 1.0) * (2.0 * projector() - Eigen::MatrixXcd::Identity(N, N));
    }

    void validate(double tol) const {
        const int d = dim();
        if (2 * d > ambient_dim())
            throw NotLagrangianError("frame spans more than half the truncated space");
        const Eigen::MatrixXcd gram =
            columns.adjoint() * columns - Eigen::MatrixXcd::Identity(d, d);
        if (gram.norm() > tol) throw NotLagrangianError("frame columns are not orthonormal");
        const Eigen::MatrixXcd cross = columns.adjoint() * conjugate_columns();
        if (cross.norm() > tol)
            throw NotLagrangianError("span is not isotropic: L meets Sigma(L)");
    }
};

/// Standard Lagrangian of the truncation: the chosen Lagrangian L_finite of
/// C^n at frequency zero plus every fiber direction at positive frequency.
inline LagrangianFrame standard_lagrangian(const ModeBasis& basis,
                                           const Eigen::MatrixXcd& l_finite,
                                           double tol = 1e-10) {
    const int n = basis.n;
    if (l_finite.rows() != n || l_finite.cols() != n / 2)
        throw NotLagrangianError("L_finite must be n x n/2");
    const Eigen::MatrixXcd gram =
        l_finite.adjoint() * l_finite - Eigen::MatrixXcd::Identity(n / 2, n / 2);
    if (gram.norm() > tol) throw NotLagrangianError("L_finite columns are not orthonormal");
    if ((l_finite.adjoint() * l_finite.conjugate()).norm() > tol)
        throw NotLagrangianError("L_finite meets its coordinate conjugate");

    const int d = basis.n / 2 + basis.n * basis.cutoff;
    Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(basis.dim(), d);
    int col = 0;
    for (int c = 0; c < n / 2; ++c, ++col)
        for (int a = 0; a < n; ++a) cols(basis.flat(0, a), col) = l_finite(a, c);
    for (int q = 1; q <= basis.cutoff; ++q)
        for (int a = 0; a < n; ++a, ++col) cols(basis.flat(q, a), col) = 1.0;
    return LagrangianFrame(basis, std::move(cols), tol);
}

/// Default L_finite for n = 2: span (e1 + i e2)/sqrt(2).
inline Eigen::MatrixXcd l_finite_rotation_plane() {
    Eigen::MatrixXcd m(2, 1);
    m << cdouble(1, 0), cdouble(0, 1);
    return m / std::sqrt(2.0);
}

/// Default L_finite for n = 4 on H = span{1,i,j,k}: the +i eigenvectors of
/// right multiplication by -i, so constant left multiplications commute
/// with the induced J.
inline Eigen::MatrixXcd l_finite_quaternionic() {
    Eigen::MatrixXcd m(4, 2);
    m.setZero();
    m(0, 0) = cdouble(1, 0);
    m(1, 0) = cdouble(0, 1);
    m(2, 1) = cdouble(1, 0);
    m(3, 1) = cdouble(0, -1);
    return m / std::sqrt(2.0);
}

inline TruncatedOperator projector_pl(const LagrangianFrame& frame) {
    TruncatedOperator op(frame.basis, frame.projector());
    op.verify_flags();
    return op;
}

struct MultiplicationOptions {
    bool strict = false;
    bool orthogonalize = false;
    double leak_tol = 1e-8;
};

/// Block matrix of a loop acting by pointwise multiplication: block (p, q)
/// is sigma_{p-q}; frequencies escaping the window are dropped and the
/// dropped Fourier mass reported as leakage.  With `orthogonalize`, the
/// result is replaced by the nearest unitary (polar factor), which restores
/// exact orthogonality at the window edges.
inline TruncatedOperator multiplication_operator(const ModeBasis& basis, const FourierLoop& sigma,
                                                 const MultiplicationOptions& opts = {}) {
    if (sigma.n() != basis.n) throw Error("loop fiber dimension mismatch");
    const int N = basis.dim();
    const int Q = basis.cutoff;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
    for (const auto& [k, blk] : sigma.coef) {
        for (int q = -Q; q <= Q; ++q) {
            const int p = q + k;
            if (p < -Q || p > Q) continue;
            for (int r = 0; r < basis.n; ++r)
                for (int c = 0; c < basis.n; ++c)
                    m(basis.flat(p, r), basis.flat(q, c)) += blk(r, c);
        }
    }
    double dropped = 0.0;
    for (const auto& [k, blk] : sigma.coef) {
        const double mass = blk.squaredNorm();
        for (int q = -Q; q <= Q; ++q) {
            const int p = q + k;
            if (p < -Q || p > Q) dropped += mass;
        }
    }
    TruncatedOperator op(basis, std::move(m));
    op.leakage = std::sqrt(dropped);
    if (opts.strict && op.leakage > opts.leak_tol)
        throw BandTooWideError("windowed truncation leaks more Fourier mass than tolerated");
    if (opts.orthogonalize) {
        // polar factor; the fast inverse-sqrt route needs M nonsingular.  A
        // hard truncation can be rank-deficient (pure frequency shifts lose a
        // window edge), and there the kernel completion must stay
        // Sigma-equivariant, so run that polar decomposition in the real
        // coordinates.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.mat.adjoint() * op.mat);
        const auto& ev = es.eigenvalues();
        if (ev(0) > 1e-10 * std::max(1.0, ev(ev.size() - 1))) {
            op.mat = op.mat * es.operatorInverseSqrt();
        } else {
            const Eigen::MatrixXcd rframe = basis.real_coordinate_frame();
            const Eigen::MatrixXd real_m = (rframe.adjoint() * op.mat * rframe).real();
            Eigen::BDCSVD<Eigen::MatrixXd> svd(real_m,
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
            const Eigen::MatrixXd polar = svd.matrixU() * svd.matrixV().transpose();
            op.mat = rframe * polar.cast<cdouble>() * rframe.adjoint();
        }
    }
    op.verify_flags();
    if (!op.orthogonal)
        op.orthogonal = sigma.orthogonality_defect() < 1e-8 && op.leakage < opts.leak_tol;
    return op;
}

inline double hs_commutator_norm(const Eigen::MatrixXcd& j, const Eigen::MatrixXcd& g) {
    return (j * g - g * j).norm();
}

struct CADecomposition {
    Eigen::MatrixXcd c; // commutes with J
    Eigen::MatrixXcd a; // anticommutes with J
};

inline CADecomposition decompose_ca(const Eigen::MatrixXcd& g, const Eigen::MatrixXcd& j) {
    const Eigen::MatrixXcd jgj = j * g * j;
    return {0.5 * (g - jgj), 0.5 * (g + jgj)};
}

/// Smallest and largest singular values of the symmetric part C_g.
struct CSpectrumInfo {
    double smin = 0.0;
    double smax = 0.0;
    double cond() const { return smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity(); }
};

inline CSpectrumInfo c_spectrum(const Eigen::MatrixXcd& c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    es.compute(c.adjoint() * c, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {std::sqrt(std::max(0.0, ev(0))), std::sqrt(std::max(0.0, ev(ev.size() - 1)))};
}

/// Z_g = -A_g C_g^{-1}, the skew chart coordinate of g around the identity.
inline Eigen::MatrixXcd zg(const Eigen::MatrixXcd& g, const Eigen::MatrixXcd& j,
                           double cond_bound = 1e8, CSpectrumInfo* info_out = nullptr) {
    const CADecomposition ca = decompose_ca(g, j);
    const CSpectrumInfo info = c_spectrum(ca.c);
    if (info_out) *info_out = info;
    if (!(info.cond() < cond_bound))
        throw SingularCError("C_g is singular beyond the configured condition bound", info.smin);
    return -ca.a * ca.c.inverse();
}

inline void check_sym_properties(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& j,
                                 const ModeBasis& basis, double tol = 1e-8) {
    if ((z + z.adjoint()).norm() > tol) throw NotSymError("Z is not skew-adjoint");
    if ((j * z + z * j).norm() > tol) throw NotSymError("Z does not anticommute with J");
    if ((z - basis.sigma_conjugate(z)).norm() > tol)
        throw NotSymError("Z does not commute with the real structure");
}

/// Continuous right inverse of g -> Z_g: w = (1 - z)(1 + z*z)^{-1/2}.
inline Eigen::MatrixXcd retract(const Eigen::MatrixXcd& z) {
    const int N = static_cast<int>(z.rows());
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(N, N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(id + z.adjoint() * z);
    return (id - z) * es.operatorInverseSqrt();
}

/// For K near J, the unitary polar factor of 1 - KJ conjugates J to K and
/// is the identity when K = J.
inline Eigen::MatrixXcd canonical_conjugator(const Eigen::MatrixXcd& j, const Eigen::MatrixXcd& k,
                                             double tol = 1e-9) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> gap(k - j);
    if (gap.singularValues()(0) >= 2.0 - tol)
        throw TooFarError("unitary structures too far apart for the canonical conjugator");
    const int N = static_cast<int>(j.rows());
    const Eigen::MatrixXcd x = Eigen::MatrixXcd::Identity(N, N) - k * j;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

} // namespace fockgerbe
