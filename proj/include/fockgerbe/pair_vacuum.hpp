#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "fockgerbe/fock.hpp"
#include "fockgerbe/modes.hpp"

namespace fockgerbe {

// ---------------------------------------------------------------------------
// Youla pairing of a complex antisymmetric matrix
// ---------------------------------------------------------------------------

struct YoulaPair {
    double c = 0.0;       // >= 0
    Eigen::VectorXcd v;   // first leg
    Eigen::VectorXcd u;   // second leg, u = W conj(v) / c
};

struct YoulaDecomposition {
    std::vector<YoulaPair> pairs;
    double residual = 0.0; // || W - sum c (u v^T - v u^T) ||
};

/// Pairing form of an antisymmetric W: W = sum_i c_i (u_i v_i^T - v_i u_i^T)
/// with { v_i, u_i } orthonormal.  Built from the spectral pairing of W W*.
inline YoulaDecomposition youla_pairs(const Eigen::MatrixXcd& w, double tol = 1e-11) {
    const int d = static_cast<int>(w.rows());
    YoulaDecomposition out;
    if ((w + w.transpose()).norm() > 1e-8 * std::max(1.0, w.norm()))
        throw Error("youla_pairs expects an antisymmetric matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w * w.adjoint());
    // columns with eigenvalue above tol^2, largest first
    std::vector<Eigen::VectorXcd> pool;
    for (int i = d - 1; i >= 0; --i) {
        if (es.eigenvalues()(i) > tol * tol) pool.push_back(es.eigenvectors().col(i));
    }
    std::vector<Eigen::VectorXcd> taken;
    auto deflate = [&](Eigen::VectorXcd x) {
        for (const auto& t : taken) x -= t * (t.adjoint() * x)(0);
        return x;
    };
    for (auto& cand : pool) {
        Eigen::VectorXcd v = deflate(cand);
        if (v.norm() < 1e-7) continue;
        v.normalize();
        Eigen::VectorXcd wu = w * v.conjugate();
        Eigen::VectorXcd u = deflate(wu);
        const double c = u.norm();
        if (c < tol) continue;
        u /= c;
        taken.push_back(v);
        taken.push_back(u);
        out.pairs.push_back({c, v, u});
    }
    Eigen::MatrixXcd rec = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& p : out.pairs)
        rec += p.c * (p.u * p.v.transpose() - p.v * p.u.transpose());
    out.residual = (w - rec).norm();
    return out;
}

// ---------------------------------------------------------------------------
// sparse exterior-algebra vectors over a small set of virtual modes
// ---------------------------------------------------------------------------

/// Vector in the exterior algebra of up to 32 orthonormal "virtual" modes,
/// stored sparsely by subset mask.  Used for vacuum-condition residuals at
/// scales where a dense Fock enumeration is out of reach.
struct SparseWedge {
    std::unordered_map<std::uint32_t, cdouble> amps;

    static int sign_below(std::uint32_t s, int j) {
        return (std::popcount(s & ((std::uint32_t{1} << j) - 1)) % 2 == 0) ? 1 : -1;
    }

    /// wedge with the vector sum_m gamma_m e_m
    SparseWedge wedge(const Eigen::VectorXcd& gamma) const {
        SparseWedge out;
        for (const auto& [s, a] : amps) {
            for (int m = 0; m < gamma.size(); ++m) {
                if (gamma(m) == cdouble{}) continue;
                const std::uint32_t bit = std::uint32_t{1} << m;
                if (s & bit) continue;
                out.amps[s | bit] += a * gamma(m) * static_cast<double>(sign_below(s, m));
            }
        }
        return out;
    }

    /// contraction with the vector sum_m lambda_m e_m (conjugate-linear in it)
    SparseWedge contract(const Eigen::VectorXcd& lambda) const {
        SparseWedge out;
        for (const auto& [s, a] : amps) {
            for (int m = 0; m < lambda.size(); ++m) {
                if (lambda(m) == cdouble{}) continue;
                const std::uint32_t bit = std::uint32_t{1} << m;
                if (!(s & bit)) continue;
                out.amps[s & ~bit] +=
                    a * std::conj(lambda(m)) * static_cast<double>(sign_below(s, m));
            }
        }
        return out;
    }

    SparseWedge& add_scaled(const SparseWedge& other, cdouble scale) {
        for (const auto& [s, a] : other.amps) amps[s] += scale * a;
        return *this;
    }

    double norm() const {
        double n2 = 0.0;
        for (const auto& [s, a] : amps) n2 += std::norm(a);
        return std::sqrt(n2);
    }
};

// ---------------------------------------------------------------------------
// product-form vacuum vectors
// ---------------------------------------------------------------------------

/// Unit vacuum vector in stabilized product form
///   phase * prod_i ( cos(alpha_i) + sin(alpha_i) s_i  a_i /\ b_i ),
/// with (a_i, b_i) orthonormal ambient columns and |s_i| = 1.  Regular for
/// every alpha in [0, pi/2]; alpha = pi/2 is a fully rotated pair.
struct PairVacuum {
    Eigen::MatrixXcd cols; // N x 2r, columns a_1, b_1, a_2, b_2, ...
    std::vector<double> alpha;
    std::vector<cdouble> spin; // unit phases of the sine coefficients
    cdouble phase{1.0, 0.0};

    int pair_count() const { return static_cast<int>(alpha.size()); }

    static PairVacuum trivial(int ambient_dim) {
        PairVacuum v;
        v.cols = Eigen::MatrixXcd::Zero(ambient_dim, 0);
        return v;
    }

    cdouble cos_coef(int i) const { return std::cos(alpha[static_cast<std::size_t>(i)]); }
    cdouble sin_coef(int i) const {
        return std::sin(alpha[static_cast<std::size_t>(i)]) * spin[static_cast<std::size_t>(i)];
    }

    /// expansion over the virtual modes 0..2r-1 (mode 2i = a_i, 2i+1 = b_i)
    SparseWedge expand() const {
        SparseWedge v;
        v.amps[0] = phase;
        for (int i = 0; i < pair_count(); ++i) {
            SparseWedge next;
            const std::uint32_t pair_bits = std::uint32_t{3} << (2 * i);
            for (const auto& [s, a] : v.amps) {
                next.amps[s] += a * cos_coef(i);
                next.amps[s | pair_bits] += a * sin_coef(i); // a/\b on fresh modes: sign +1
            }
            v = std::move(next);
        }
        return v;
    }
};

/// <x, y> of two product-form vacua via Grammian minors over subsets of pairs.
inline cdouble pair_vacuum_overlap(const PairVacuum& x, const PairVacuum& y) {
    const int rx = x.pair_count(), ry = y.pair_count();
    const Eigen::MatrixXcd gram = y.cols.adjoint() * x.cols; // (2ry) x (2rx)
    cdouble total{0.0, 0.0};
    for (std::uint32_t sx = 0; sx < (1u << rx); ++sx) {
        cdouble cx = x.phase;
        std::vector<int> xcols;
        for (int i = 0; i < rx; ++i) {
            if (sx & (1u << i)) {
                cx *= x.sin_coef(i);
                xcols.push_back(2 * i);
                xcols.push_back(2 * i + 1);
            } else {
                cx *= x.cos_coef(i);
            }
        }
        for (std::uint32_t sy = 0; sy < (1u << ry); ++sy) {
            if (std::popcount(sx) != std::popcount(sy)) continue;
            cdouble cy = y.phase;
            std::vector<int> ycols;
            for (int i = 0; i < ry; ++i) {
                if (sy & (1u << i)) {
                    cy *= y.sin_coef(i);
                    ycols.push_back(2 * i);
                    ycols.push_back(2 * i + 1);
                } else {
                    cy *= y.cos_coef(i);
                }
            }
            const int k = static_cast<int>(xcols.size());
            cdouble det{1.0, 0.0};
            if (k > 0) {
                Eigen::MatrixXcd m(k, k);
                for (int r = 0; r < k; ++r)
                    for (int c = 0; c < k; ++c)
                        m(r, c) = gram(ycols[static_cast<std::size_t>(c)],
                                       xcols[static_cast<std::size_t>(r)]);
                det = m.determinant();
            }
            total += cx * std::conj(cy) * det;
        }
    }
    return total;
}

struct PairVacuumResult {
    PairVacuum vac;
    double sigma_min_c = 0.0;
    double youla_residual = 0.0;
};

/// Product-form vacuum of pi_L o theta_g from the skew chart coordinate Z_g.
inline PairVacuumResult pair_vacuum_of(const TruncatedOperator& g, const LagrangianFrame& frame,
                                       double cond_bound = 1e8, double pair_tol = 1e-9) {
    const Eigen::MatrixXcd j = frame.unitary_structure();
    CSpectrumInfo info;
    const Eigen::MatrixXcd z = zg(g.mat, j, cond_bound, &info);
    const Eigen::MatrixXcd b = frame.columns.adjoint() * z * frame.conjugate_columns();
    // coefficient two-form of the vacuum: <zeta, x /\ y> = <Z Sigma x, y>
    const Eigen::MatrixXcd w = b.transpose();
    const YoulaDecomposition yd = youla_pairs(w, pair_tol);

    PairVacuumResult out;
    out.sigma_min_c = info.smin;
    out.youla_residual = yd.residual;
    const int r = static_cast<int>(yd.pairs.size());
    out.vac.cols = Eigen::MatrixXcd::Zero(frame.ambient_dim(), 2 * r);
    for (int i = 0; i < r; ++i) {
        const auto& p = yd.pairs[static_cast<std::size_t>(i)];
        out.vac.cols.col(2 * i) = frame.columns * p.v;        // a_i
        out.vac.cols.col(2 * i + 1) = -frame.columns * p.u;   // b_i = -u_i
        out.vac.alpha.push_back(std::atan(p.c));
        out.vac.spin.push_back(cdouble{1.0, 0.0});
    }
    return out;
}

/// max_j || pi_L( g Sigma l_j ) Omega || — the vacuum-condition defect of a
/// product-form vacuum, computed on the small virtual-mode algebra.
inline double vacuum_condition_residual(const PairVacuum& vac, const TruncatedOperator& g,
                                        const LagrangianFrame& frame) {
    const int r = vac.pair_count();
    const SparseWedge base = vac.expand();
    const Eigen::MatrixXcd& f = frame.columns;
    const double rt2 = std::sqrt(2.0);
    double worst = 0.0;
    for (int jmode = 0; jmode < frame.dim(); ++jmode) {
        const Eigen::VectorXcd y =
            g.mat * frame.basis.real_structure(f.col(jmode)); // theta_g of a conjugate mode
        const Eigen::VectorXcd cw_frame = f.adjoint() * y;    // P_L y in L-frame coords
        const Eigen::VectorXcd wvec = f * cw_frame;           // ambient P_L y
        const Eigen::VectorXcd resid = y - wvec;
        const Eigen::VectorXcd lc = frame.basis.real_structure(resid); // Sigma P_Lbar y, in L
        // coordinates over virtual modes (pair columns + one overflow direction)
        Eigen::VectorXcd gamma = Eigen::VectorXcd::Zero(2 * r + 1);
        Eigen::VectorXcd inpart = Eigen::VectorXcd::Zero(frame.ambient_dim());
        if (r > 0) {
            gamma.head(2 * r) = vac.cols.adjoint() * wvec;
            inpart = vac.cols * gamma.head(2 * r);
        }
        const Eigen::VectorXcd wout = wvec - inpart;
        const double wout_n = wout.norm();
        if (wout_n > 1e-14) gamma(2 * r) = wout_n;
        Eigen::VectorXcd lambda = Eigen::VectorXcd::Zero(2 * r + 1);
        if (r > 0) lambda.head(2 * r) = vac.cols.adjoint() * lc;
        if (wout_n > 1e-14) lambda(2 * r) = (wout.adjoint() * lc)(0) / wout_n;

        SparseWedge total = base.wedge(gamma);
        total.add_scaled(base.contract(lambda), cdouble{1.0, 0.0});
        worst = std::max(worst, rt2 * total.norm());
    }
    return worst;
}

/// Expansion of a product-form vacuum on a dense Fock basis over a frame
/// containing its pair columns; for cross-checks at small scale.
inline FockVector pair_vacuum_to_fock(const PairVacuum& vac, const FockBasisPtr& fb) {
    FockVector v = FockVector::vacuum(fb);
    v.amps *= vac.phase;
    for (int i = 0; i < vac.pair_count(); ++i) {
        const Eigen::VectorXcd ca = fb->frame.columns.adjoint() * vac.cols.col(2 * i);
        const Eigen::VectorXcd cb = fb->frame.columns.adjoint() * vac.cols.col(2 * i + 1);
        const Eigen::MatrixXcd wedge_ab = wedge_op(*fb, ca) * wedge_op(*fb, cb);
        FockVector next(fb);
        next.amps = vac.cos_coef(i) * v.amps + vac.sin_coef(i) * (wedge_ab * v.amps);
        v = std::move(next);
    }
    return v;
}

} // namespace fockgerbe
