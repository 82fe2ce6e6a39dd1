#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "fockgerbe/errors.hpp"
#include "fockgerbe/modes.hpp"

namespace fockgerbe {

using mask_t = std::uint64_t;

inline int mask_degree(mask_t m) { return std::popcount(m); }

/// Sign of merging the increasing tuple of S with the increasing tuple of T
/// into one increasing tuple: (-1)^{inversions}; 0 overlap is the caller's
/// business.
inline int merge_sign(mask_t s, mask_t t) {
    int inversions = 0;
    while (t) {
        const int j = std::countr_zero(t);
        t &= t - 1;
        inversions += std::popcount(s >> (j + 1));
    }
    return (inversions % 2 == 0) ? 1 : -1;
}

/// Degree-capped enumeration of the exterior algebra of a Lagrangian frame.
/// Subsets of L-basis indices are bitmasks, sorted by (degree, tuple-lex).
struct FockBasis {
    LagrangianFrame frame;
    int degree_cap = 0;
    std::vector<mask_t> masks;
    std::unordered_map<mask_t, int> index_of;

    FockBasis(LagrangianFrame fr, int cap) : frame(std::move(fr)), degree_cap(cap) {
        const int d = frame.dim();
        if (d > 62) throw Error("Fock basis limited to 62 modes");
        if (cap < 0 || cap > d) degree_cap = d;
        enumerate();
    }

    int modes() const { return frame.dim(); }
    int dim() const { return static_cast<int>(masks.size()); }

    bool has(mask_t m) const { return index_of.count(m) != 0; }
    int index(mask_t m) const {
        auto it = index_of.find(m);
        if (it == index_of.end()) throw Error("mask outside the Fock enumeration");
        return it->second;
    }

private:
    static bool tuple_lex_less(mask_t a, mask_t b) {
        const int da = mask_degree(a), db = mask_degree(b);
        if (da != db) return da < db;
        while (a && b) {
            const int ia = std::countr_zero(a), ib = std::countr_zero(b);
            if (ia != ib) return ia < ib;
            a &= a - 1;
            b &= b - 1;
        }
        return a < b;
    }

    void enumerate() {
        const int d = modes();
        std::vector<mask_t> all;
        // masks of each degree via combination walking
        for (int k = 0; k <= degree_cap; ++k) {
            std::vector<int> idx(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
            if (k == 0) {
                all.push_back(0);
                continue;
            }
            if (k > d) break;
            while (true) {
                mask_t m = 0;
                for (int i : idx) m |= (mask_t{1} << i);
                all.push_back(m);
                int pos = k - 1;
                while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == d - k + pos) --pos;
                if (pos < 0) break;
                ++idx[static_cast<std::size_t>(pos)];
                for (int i = pos + 1; i < k; ++i)
                    idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
            }
        }
        std::sort(all.begin(), all.end(), tuple_lex_less);
        masks = std::move(all);
        for (int i = 0; i < dim(); ++i) index_of[masks[static_cast<std::size_t>(i)]] = i;
    }
};

using FockBasisPtr = std::shared_ptr<const FockBasis>;

inline FockBasisPtr make_fock_basis(LagrangianFrame frame, int degree_cap) {
    return std::make_shared<const FockBasis>(std::move(frame), degree_cap);
}

struct FockVector {
    FockBasisPtr basis;
    Eigen::VectorXcd amps;

    FockVector() = default;
    explicit FockVector(FockBasisPtr b) : basis(std::move(b)) {
        amps = Eigen::VectorXcd::Zero(basis->dim());
    }

    static FockVector vacuum(FockBasisPtr b) {
        FockVector v(std::move(b));
        v.amps(0) = 1.0;
        return v;
    }

    double norm() const { return amps.norm(); }
    cdouble amp(mask_t m) const { return basis->has(m) ? amps(basis->index(m)) : cdouble{}; }
};

inline cdouble inner(const FockVector& x, const FockVector& y) {
    return (y.amps.adjoint() * x.amps)(0);
}

enum class Parity { Even, Odd, Mixed };

inline Parity parity(const FockVector& w, double tol = 1e-12) {
    bool even = false, odd = false;
    for (int i = 0; i < w.basis->dim(); ++i) {
        if (std::abs(w.amps(i)) <= tol) continue;
        (mask_degree(w.basis->masks[static_cast<std::size_t>(i)]) % 2 == 0 ? even : odd) = true;
    }
    if (even && odd) return Parity::Mixed;
    return odd ? Parity::Odd : Parity::Even;
}

struct FockOperator {
    FockBasisPtr domain;
    FockBasisPtr codomain;
    Eigen::MatrixXcd mat;

    FockOperator() = default;
    FockOperator(FockBasisPtr dom, FockBasisPtr cod)
        : domain(std::move(dom)), codomain(std::move(cod)) {
        mat = Eigen::MatrixXcd::Zero(codomain->dim(), domain->dim());
    }

    double unitary_defect() const {
        return (mat.adjoint() * mat -
                Eigen::MatrixXcd::Identity(domain->dim(), domain->dim()))
            .norm();
    }

    FockVector apply(const FockVector& v) const {
        FockVector out(codomain);
        out.amps = mat * v.amps;
        return out;
    }
};

// ---------------------------------------------------------------------------
// creators, annihilators, Clifford representation
// ---------------------------------------------------------------------------

/// Bare wedge with L-basis vector j (no sqrt(2)); wedges above the cap drop.
inline FockOperator creator(const FockBasisPtr& fb, int j) {
    FockOperator op(fb, fb);
    const mask_t bit = mask_t{1} << j;
    for (int i = 0; i < fb->dim(); ++i) {
        const mask_t s = fb->masks[static_cast<std::size_t>(i)];
        if (s & bit) continue;
        const mask_t t = s | bit;
        if (!fb->has(t)) continue;
        const int sign = (std::popcount(s & (bit - 1)) % 2 == 0) ? 1 : -1;
        op.mat(fb->index(t), i) = sign;
    }
    return op;
}

/// Bare contraction with L-basis vector j; the adjoint of creator(j).
inline FockOperator annihilator(const FockBasisPtr& fb, int j) {
    FockOperator op(fb, fb);
    const mask_t bit = mask_t{1} << j;
    for (int i = 0; i < fb->dim(); ++i) {
        const mask_t s = fb->masks[static_cast<std::size_t>(i)];
        if (!(s & bit)) continue;
        const int sign = (std::popcount(s & (bit - 1)) % 2 == 0) ? 1 : -1;
        op.mat(fb->index(s & ~bit), i) = sign;
    }
    return op;
}

/// Wedge with the L-vector of frame coordinates c.
inline Eigen::MatrixXcd wedge_op(const FockBasis& fb, const Eigen::VectorXcd& c) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(fb.dim(), fb.dim());
    for (int i = 0; i < fb.dim(); ++i) {
        const mask_t s = fb.masks[static_cast<std::size_t>(i)];
        for (int j = 0; j < fb.modes(); ++j) {
            if (c(j) == cdouble{}) continue;
            const mask_t bit = mask_t{1} << j;
            if (s & bit) continue;
            const mask_t t = s | bit;
            if (!fb.has(t)) continue;
            const int sign = (std::popcount(s & (bit - 1)) % 2 == 0) ? 1 : -1;
            m(fb.index(t), i) += static_cast<double>(sign) * c(j);
        }
    }
    return m;
}

/// Contraction with the L-vector of frame coordinates c (conjugate-linear in c).
inline Eigen::MatrixXcd contract_op(const FockBasis& fb, const Eigen::VectorXcd& c) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(fb.dim(), fb.dim());
    for (int i = 0; i < fb.dim(); ++i) {
        const mask_t s = fb.masks[static_cast<std::size_t>(i)];
        for (int j = 0; j < fb.modes(); ++j) {
            if (c(j) == cdouble{}) continue;
            const mask_t bit = mask_t{1} << j;
            if (!(s & bit)) continue;
            const int sign = (std::popcount(s & (bit - 1)) % 2 == 0) ? 1 : -1;
            m(fb.index(s & ~bit), i) += static_cast<double>(sign) * std::conj(c(j));
        }
    }
    return m;
}

/// pi_L(x) for an ambient vector x, complex-linearly extended to H:
/// sqrt(2) (P_L x) /\ .  +  sqrt(2) (Sigma P_{Lbar} x) -| . ;
/// on real x this is the self-adjoint Clifford map.
inline Eigen::MatrixXcd clifford_rep(const FockBasis& fb, const Eigen::VectorXcd& x) {
    const auto& fr = fb.frame;
    const Eigen::VectorXcd cw = fr.columns.adjoint() * x;
    const Eigen::VectorXcd resid = x - fr.columns * cw;
    const Eigen::VectorXcd cc = fr.columns.adjoint() * fr.basis.real_structure(resid);
    const double rt2 = std::sqrt(2.0);
    return rt2 * (wedge_op(fb, cw) + contract_op(fb, cc));
}

// ---------------------------------------------------------------------------
// Clifford words and Bogoliubov substitution
// ---------------------------------------------------------------------------

/// A scalar multiple of a monomial v_1 v_2 ... v_k of Sigma-fixed vectors.
struct CliffordWord {
    cdouble coeff{1.0, 0.0};
    std::vector<Eigen::VectorXcd> factors;
};

inline CliffordWord bogoliubov(const CliffordWord& word, const TruncatedOperator& g,
                               double tol = 1e-9) {
    if (g.real_defect() > tol || g.orthogonal_defect() > tol)
        throw NonOrthogonalError("Bogoliubov substitution requires a real orthogonal operator");
    CliffordWord out;
    out.coeff = word.coeff;
    out.factors.reserve(word.factors.size());
    for (const auto& v : word.factors) out.factors.push_back(g.mat * v);
    return out;
}

inline Eigen::MatrixXcd rep_word(const FockBasis& fb, const CliffordWord& word) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(fb.dim(), fb.dim());
    for (const auto& v : word.factors) m = m * clifford_rep(fb, v);
    return word.coeff * m;
}

// ---------------------------------------------------------------------------
// exterior powers: Lambda_g and frame changes
// ---------------------------------------------------------------------------

/// Matrix of minors: entry (T, S) = det A[T, S] for |T| = |S|; the exterior
/// power of the mode-space map A on the capped enumerations.
inline Eigen::MatrixXcd exterior_minor_matrix(const Eigen::MatrixXcd& a, const FockBasis& domain,
                                              const FockBasis& codomain) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(codomain.dim(), domain.dim());
    std::vector<int> rows, cols;
    for (int si = 0; si < domain.dim(); ++si) {
        const mask_t s = domain.masks[static_cast<std::size_t>(si)];
        cols.clear();
        for (mask_t m = s; m; m &= m - 1) cols.push_back(std::countr_zero(m));
        const int k = static_cast<int>(cols.size());
        for (int ti = 0; ti < codomain.dim(); ++ti) {
            const mask_t t = codomain.masks[static_cast<std::size_t>(ti)];
            if (mask_degree(t) != k) continue;
            rows.clear();
            for (mask_t m = t; m; m &= m - 1) rows.push_back(std::countr_zero(m));
            if (k == 0) {
                out(ti, si) = 1.0;
                continue;
            }
            Eigen::MatrixXcd minor(k, k);
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c)
                    minor(r, c) = a(rows[static_cast<std::size_t>(r)],
                                    cols[static_cast<std::size_t>(c)]);
            out(ti, si) = minor.determinant();
        }
    }
    return out;
}

/// Functorial isomorphism F(L) -> F(gL) sending l_{i1}/\.../\l_{ik} to
/// (g l_{i1})/\.../\(g l_{ik}).  With no target frame given, the codomain is
/// the pushforward frame g*F and the matrix is the identity; against an
/// explicit frame of gL the matrix is the exterior power of the frame change.
inline FockOperator lambda_g(const TruncatedOperator& g, const FockBasisPtr& domain,
                             const FockBasisPtr& codomain = nullptr, double tol = 1e-9) {
    if (g.real_defect() > tol || g.orthogonal_defect() > tol)
        throw NonOrthogonalError("Lambda_g requires a real orthogonal operator");
    const Eigen::MatrixXcd pushed = g.mat * domain->frame.columns;
    if (!codomain) {
        FockBasisPtr cod = make_fock_basis(
            LagrangianFrame(domain->frame.basis, pushed, 1e-8), domain->degree_cap);
        FockOperator op(domain, cod);
        op.mat = Eigen::MatrixXcd::Identity(cod->dim(), domain->dim());
        return op;
    }
    const Eigen::MatrixXcd residual =
        pushed - codomain->frame.columns * (codomain->frame.columns.adjoint() * pushed);
    if (residual.norm() > 1e-7)
        throw NonOrthogonalError("codomain frame does not span gL");
    const Eigen::MatrixXcd a = codomain->frame.columns.adjoint() * pushed;
    FockOperator op(domain, codomain);
    op.mat = exterior_minor_matrix(a, *domain, *codomain);
    return op;
}

// ---------------------------------------------------------------------------
// tau, quadratic exponentials, vacuum vectors
// ---------------------------------------------------------------------------

/// Inverse of the isometry tau: the degree-2 vector with
/// <zeta, l_j /\ l_p> = sqrt(2) <Z Sigma l_j, l_p>.
inline FockVector tau_inverse(const Eigen::MatrixXcd& z, const FockBasisPtr& fb,
                              double sym_tol = 1e-8) {
    const auto& fr = fb->frame;
    check_sym_properties(z, fr.unitary_structure(), fr.basis, sym_tol);
    if (fb->degree_cap < 2) throw Error("tau_inverse needs degree cap >= 2");
    const Eigen::MatrixXcd b = fr.columns.adjoint() * z * fr.conjugate_columns();
    // b(p, j) = <Z Sigma l_j, l_p>; antisymmetry of W = sqrt(2) b^T is implied
    FockVector zeta(fb);
    const double rt2 = std::sqrt(2.0);
    for (int j = 0; j < fb->modes(); ++j)
        for (int p = j + 1; p < fb->modes(); ++p) {
            const mask_t m = (mask_t{1} << j) | (mask_t{1} << p);
            zeta.amps(fb->index(m)) = rt2 * b(p, j);
        }
    return zeta;
}

/// Wedge product of capped vectors; amplitude landing above the cap is
/// accumulated into *dropped (squared norm).
inline FockVector wedge_product(const FockVector& x, const FockVector& y,
                                double* dropped = nullptr) {
    FockVector out(x.basis);
    const auto& fb = *x.basis;
    for (int i = 0; i < fb.dim(); ++i) {
        const cdouble xa = x.amps(i);
        if (xa == cdouble{}) continue;
        const mask_t s = fb.masks[static_cast<std::size_t>(i)];
        for (int k = 0; k < fb.dim(); ++k) {
            const cdouble ya = y.amps(k);
            if (ya == cdouble{}) continue;
            const mask_t t = fb.masks[static_cast<std::size_t>(k)];
            if (s & t) continue;
            const mask_t u = s | t;
            const cdouble contrib = xa * ya * static_cast<double>(merge_sign(s, t));
            if (!fb.has(u)) {
                if (dropped) *dropped += std::norm(contrib);
                continue;
            }
            out.amps(fb.index(u)) += contrib;
        }
    }
    return out;
}

struct QuadExpResult {
    FockVector value;
    double dropped_mass = 0.0; // squared amplitude above the cap
};

/// exp(zeta) = sum_k zeta^k / k! for degree-2 zeta; terminates once a wedge
/// power vanishes, truncating (and reporting) mass above the degree cap.
inline QuadExpResult quad_exp(const FockVector& zeta) {
    for (int i = 0; i < zeta.basis->dim(); ++i)
        if (std::abs(zeta.amps(i)) > 0 &&
            mask_degree(zeta.basis->masks[static_cast<std::size_t>(i)]) != 2)
            throw Error("quad_exp expects a pure degree-2 vector");
    QuadExpResult res;
    res.value = FockVector::vacuum(zeta.basis);
    FockVector term = FockVector::vacuum(zeta.basis);
    for (int k = 1; k <= zeta.basis->degree_cap / 2 + 1; ++k) {
        term = wedge_product(term, zeta, &res.dropped_mass);
        term.amps /= static_cast<double>(k);
        if (term.norm() == 0.0) break;
        res.value.amps += term.amps;
    }
    return res;
}

struct VacuumResult {
    FockVector vec;       // unit norm
    FockVector zeta;      // tau^{-1}(Z_g)
    double sigma_min_c = 0.0;
    double dropped_mass = 0.0;
};

/// Unit L-vacuum vector for pi_L o theta_g: exp(zeta) normalized, where the
/// two-form zeta has <zeta, x /\ y> = <Z_g Sigma x, y>.  (In the tau scaling
/// this is exp(tau^{-1}(Z_g) / sqrt 2); the annihilation conditions pin the
/// normalization, and the null-space oracle in the tests confirms it.)
inline VacuumResult vacuum_vector(const TruncatedOperator& g, const FockBasisPtr& fb,
                                  double cond_bound = 1e8) {
    const Eigen::MatrixXcd j = fb->frame.unitary_structure();
    CSpectrumInfo info;
    const Eigen::MatrixXcd z = zg(g.mat, j, cond_bound, &info);
    VacuumResult out;
    out.sigma_min_c = info.smin;
    out.zeta = tau_inverse(z, fb);
    out.zeta.amps /= std::sqrt(2.0);
    QuadExpResult qe = quad_exp(out.zeta);
    out.dropped_mass = qe.dropped_mass;
    const double n = qe.value.norm();
    if (n == 0.0) throw NonConvergedError("vacuum exponential vanished");
    qe.value.amps /= n;
    out.vec = std::move(qe.value);
    return out;
}

// ---------------------------------------------------------------------------
// implementers and intertwiners
// ---------------------------------------------------------------------------

struct ImplementerOptions {
    double cond_bound = 1e8;
    double residual_tol = 1e-6; // NonConvergedError beyond this
    bool polar_correct = true;
};

struct ImplementerResult {
    FockOperator op; // unitary on F(L), phase: <U Omega, Omega_g> real positive
    double residual = 0.0;       // max intertwining defect over mode generators
    double unitary_defect = 0.0; // before polar correction
    double sigma_min_c = 0.0;
};

namespace detail {

inline double intertwining_residual(const FockBasis& fb, const Eigen::MatrixXcd& u,
                                    const Eigen::MatrixXcd& g) {
    const int d = fb.modes();
    double worst = 0.0;
    for (int j = 0; j < d; ++j) {
        const Eigen::VectorXcd lj = fb.frame.columns.col(j);
        const Eigen::VectorXcd lbar = fb.frame.basis.real_structure(lj);
        for (const Eigen::VectorXcd& x : {lj, lbar}) {
            const Eigen::MatrixXcd lhs = u * clifford_rep(fb, x);
            const Eigen::MatrixXcd rhs = clifford_rep(fb, g * x) * u;
            worst = std::max(worst, (lhs - rhs).norm() / std::sqrt(static_cast<double>(fb.dim())));
        }
    }
    return worst;
}

} // namespace detail

/// Canonical implementer of theta_g in pi_L: the unitary defined by
/// U (pi_L(a) Omega) = (pi_L o theta_g)(a) Omega_g on monomial columns,
/// with Omega_g the exponential vacuum.
inline ImplementerResult implementer(const TruncatedOperator& g, const FockBasisPtr& fb,
                                     const ImplementerOptions& opts = {}) {
    if (g.real_defect() > 1e-8 || g.orthogonal_defect() > 1e-8)
        throw NonOrthogonalError("implementer requires a real orthogonal operator");
    const VacuumResult vac = vacuum_vector(g, fb, opts.cond_bound);
    const FockBasis& b = *fb;
    const int dimF = b.dim();
    const int d = b.modes();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dimF, dimF);
    u.col(0) = vac.vec.amps;
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    for (int j = d - 1; j >= 0; --j) {
        const Eigen::VectorXcd glj = g.mat * b.frame.columns.col(j);
        const Eigen::MatrixXcd pj = clifford_rep(b, glj);
        for (int i = 0; i < dimF; ++i) {
            const mask_t s = b.masks[static_cast<std::size_t>(i)];
            if (!s || std::countr_zero(s) != j) continue;
            u.col(i) = inv_rt2 * (pj * u.col(b.index(s & (s - 1))));
        }
    }
    ImplementerResult res;
    res.sigma_min_c = vac.sigma_min_c;
    res.unitary_defect =
        (u.adjoint() * u - Eigen::MatrixXcd::Identity(dimF, dimF)).norm();
    if (opts.polar_correct) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU() * svd.matrixV().adjoint();
        const cdouble overlap = (vac.vec.amps.adjoint() * u.col(0))(0);
        if (std::abs(overlap) > 1e-12) u *= std::conj(overlap) / std::abs(overlap);
    }
    res.residual = detail::intertwining_residual(b, u, g.mat);
    if (res.residual > opts.residual_tol)
        throw NonConvergedError("implementer intertwining residual exceeds tolerance");
    res.op = FockOperator(fb, fb);
    res.op.mat = std::move(u);
    return res;
}

struct BruteForceOptions {
    int max_dim = 256;
    double null_tol = 1e-9;  // largest acceptable smallest eigenvalue of the system
    double gap_tol = 1e-6;   // second eigenvalue must exceed this
};

struct BruteForceResult {
    FockOperator op;
    double lambda_min = 0.0;
    double lambda_second = 0.0;
};

/// Independent oracle: solves the linear intertwining system
/// U pi(x) = pi(g x) U over all mode generators, by the smallest eigenpairs
/// of the stacked normal matrix.  The solution space must be 1-dimensional.
inline BruteForceResult brute_force_implementer(const TruncatedOperator& g, const FockBasisPtr& fb,
                                                const BruteForceOptions& opts = {}) {
    const FockBasis& b = *fb;
    const int dimF = b.dim();
    if (dimF > opts.max_dim) throw Error("brute-force implementer limited to small Fock spaces");
    const int nn = dimF * dimF;
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(nn, nn);
    const Eigen::MatrixXcd idF = Eigen::MatrixXcd::Identity(dimF, dimF);
    auto kron = [&](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& bm) {
        Eigen::MatrixXcd out(nn, nn);
        for (int i = 0; i < dimF; ++i)
            for (int k = 0; k < dimF; ++k)
                out.block(i * dimF, k * dimF, dimF, dimF) = a(i, k) * bm;
        return out;
    };
    for (int j = 0; j < b.modes(); ++j) {
        const Eigen::VectorXcd lj = b.frame.columns.col(j);
        const Eigen::VectorXcd lbar = b.frame.basis.real_structure(lj);
        for (const Eigen::VectorXcd& x : {lj, lbar}) {
            const Eigen::MatrixXcd bb = clifford_rep(b, g.mat * x);
            const Eigen::MatrixXcd cc = clifford_rep(b, x);
            // K = I (x) B - C^T (x) I ; accumulate K* K
            gram += kron(idF, bb.adjoint() * bb);
            gram += kron(cc.conjugate() * cc.transpose(), idF);
            gram -= kron(cc.transpose(), bb.adjoint());
            gram -= kron(cc.conjugate(), bb);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    BruteForceResult res;
    res.lambda_min = es.eigenvalues()(0);
    res.lambda_second = es.eigenvalues()(1);
    if (!(res.lambda_min < opts.null_tol) || !(res.lambda_second > opts.gap_tol))
        throw DegenerateSolutionError("intertwining system null space is not 1-dimensional");
    Eigen::MatrixXcd u(dimF, dimF);
    const Eigen::VectorXcd v = es.eigenvectors().col(0);
    for (int c = 0; c < dimF; ++c) u.col(c) = v.segment(c * dimF, dimF);
    // the null vector is a scalar multiple of a unitary; rescale and re-phase
    u *= std::sqrt(static_cast<double>(dimF)) / u.norm();
    cdouble anchor = u(0, 0);
    if (std::abs(anchor) < 1e-10) {
        int r = 0;
        u.col(0).cwiseAbs().maxCoeff(&r);
        anchor = u(r, 0);
    }
    u *= std::conj(anchor) / std::abs(anchor);
    res.op = FockOperator(fb, fb);
    res.op.mat = std::move(u);
    return res;
}

/// Intertwiner T = Lambda_g U_g^* in T(L, gL); with the pushforward codomain
/// the matrix is U^* itself.
inline FockOperator intertwiner(const TruncatedOperator& g, const FockBasisPtr& fb,
                                const ImplementerOptions& opts = {}) {
    const ImplementerResult impl = implementer(g, fb, opts);
    const FockOperator lam = lambda_g(g, fb);
    FockOperator t(fb, lam.codomain);
    t.mat = lam.mat * impl.op.mat.adjoint();
    return t;
}

// ---------------------------------------------------------------------------
// Fock sum stability
// ---------------------------------------------------------------------------

/// Enumeration of F(L1) (x) F(L2): pairs of masks, total degree within caps.
struct TensorBasis {
    FockBasisPtr left, right;
    std::vector<std::pair<int, int>> pairs;
    std::unordered_map<std::uint64_t, int> index_of;

    TensorBasis(FockBasisPtr l, FockBasisPtr r) : left(std::move(l)), right(std::move(r)) {
        for (int i = 0; i < left->dim(); ++i)
            for (int k = 0; k < right->dim(); ++k) {
                index_of[key(i, k)] = static_cast<int>(pairs.size());
                pairs.emplace_back(i, k);
            }
    }
    static std::uint64_t key(int i, int k) {
        return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(k);
    }
    int dim() const { return static_cast<int>(pairs.size()); }
};

/// Graded Clifford action on the tensor product:
/// phi(v1 + v2)(w1 (x) w2) = (pi1(v1) w1) (x) w2 + (-1)^{deg w1} w1 (x) (pi2(v2) w2).
inline Eigen::MatrixXcd tensor_clifford_rep(const TensorBasis& tb, const Eigen::VectorXcd& v1,
                                            const Eigen::VectorXcd& v2) {
    const Eigen::MatrixXcd p1 = clifford_rep(*tb.left, v1);
    const Eigen::MatrixXcd p2 = clifford_rep(*tb.right, v2);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(tb.dim(), tb.dim());
    for (int col = 0; col < tb.dim(); ++col) {
        const auto [i, k] = tb.pairs[static_cast<std::size_t>(col)];
        const int sign =
            (mask_degree(tb.left->masks[static_cast<std::size_t>(i)]) % 2 == 0) ? 1 : -1;
        for (int i2 = 0; i2 < tb.left->dim(); ++i2)
            if (p1(i2, i) != cdouble{})
                out(tb.index_of.at(TensorBasis::key(i2, k)), col) += p1(i2, i);
        for (int k2 = 0; k2 < tb.right->dim(); ++k2)
            if (p2(k2, k) != cdouble{})
                out(tb.index_of.at(TensorBasis::key(i, k2)), col) +=
                    static_cast<double>(sign) * p2(k2, k);
    }
    return out;
}

/// Grade-preserving unitary F(L1) (x) F(L2) -> F(L1 (+) L2), w1 (x) w2 -> w1 /\ w2.
/// The target basis must be built on the concatenated frame [F1 F2].
inline FockOperator fock_sum_iso(const TensorBasis& tb, const FockBasisPtr& target,
                                 double tol = 1e-10) {
    const auto& f1 = tb.left->frame;
    const auto& f2 = tb.right->frame;
    if (!(f1.basis == f2.basis)) throw NonOrthogonalBlocksError("frames on different mode bases");
    if ((f1.columns.adjoint() * f2.columns).norm() > tol ||
        (f1.columns.adjoint() * f2.conjugate_columns()).norm() > tol)
        throw NonOrthogonalBlocksError("frames do not occupy orthogonal blocks");
    const int d1 = f1.dim();
    FockOperator op;
    op.codomain = target;
    op.mat = Eigen::MatrixXcd::Zero(target->dim(), tb.dim());
    for (int col = 0; col < tb.dim(); ++col) {
        const auto [i, k] = tb.pairs[static_cast<std::size_t>(col)];
        const mask_t s = tb.left->masks[static_cast<std::size_t>(i)];
        const mask_t t = tb.right->masks[static_cast<std::size_t>(k)];
        const mask_t merged = s | (t << d1);
        if (!target->has(merged)) continue; // above target cap
        op.mat(target->index(merged), col) = 1.0;
    }
    return op;
}

} // namespace fockgerbe
