#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "fockgerbe/cech.hpp"
#include "fockgerbe/fock.hpp"
#include "fockgerbe/geometry.hpp"
#include "fockgerbe/hopf.hpp"
#include "fockgerbe/modes.hpp"
#include "fockgerbe/pair_vacuum.hpp"
#include "fockgerbe/random_support.hpp"
#include "fockgerbe/torsor.hpp"

namespace fockgerbe::suites {

struct SuiteResult {
    std::vector<std::string> failures;
    int checks = 0;

    bool ok() const { return failures.empty(); }
    void check(bool pass, const std::string& what) {
        ++checks;
        if (!pass) failures.push_back(what);
    }
    void merge(const SuiteResult& o) {
        checks += o.checks;
        failures.insert(failures.end(), o.failures.begin(), o.failures.end());
    }
};

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

inline double geom_beta_max_error(std::uint64_t seed, int count = 200) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const Quaternion x = random_unit_quaternion(rng);
        const S4Point at0 = beta_point(x, 0.0);
        const S4Point atpi = beta_point(x, kTwoPi / 2.0);
        worst = std::max(worst, (at0.z - Quaternion::one()).norm() + std::abs(at0.y));
        worst = std::max(worst, (atpi.z - x).norm() + std::abs(atpi.y));
        std::uniform_real_distribution<double> us(0.0, kTwoPi);
        const S4Point p = beta_point(x, us(rng));
        worst = std::max(worst, std::abs(p.z.norm2() + p.y * p.y - 1.0));
    }
    return worst;
}

inline double geom_chart_transition_max_error(std::uint64_t seed, int count = 1000) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        Quaternion w(g(rng), g(rng), g(rng), g(rng));
        if (w.norm2() < 1e-8) continue;
        const Quaternion lhs = stereo_north(stereo_south_inv(w));
        const Quaternion rhs = w.inverse();
        worst = std::max(worst, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
    }
    return worst;
}

inline double geom_eta_transition_max_error(std::uint64_t seed, int count = 40,
                                            std::size_t samples = 32) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        Quaternion x = random_unit_quaternion(rng);
        if ((x - Quaternion::i()).norm() < 0.2 || (x + Quaternion::i()).norm() < 0.2) {
            --i;
            continue;
        }
        const SampledLoop ei = eta_section(x, EtaSide::PlusI, samples);
        const SampledLoop emi = eta_section(x, EtaSide::MinusI, samples);
        const SampledLoop r = transition_loop_r(x, samples);
        for (std::size_t k = 0; k < samples; ++k) {
            const auto quat_at = [&](const SampledLoop& l, int off) {
                return Quaternion(l.values(off + 0, static_cast<Eigen::Index>(k)).real(),
                                  l.values(off + 1, static_cast<Eigen::Index>(k)).real(),
                                  l.values(off + 2, static_cast<Eigen::Index>(k)).real(),
                                  l.values(off + 3, static_cast<Eigen::Index>(k)).real());
            };
            const Quaternion rq = quat_at(r, 0);
            worst = std::max(worst, (quat_at(ei, 0) - rq * quat_at(emi, 0)).norm());
            worst = std::max(worst, (quat_at(ei, 4) - rq * quat_at(emi, 4)).norm());
            worst = std::max(worst, std::abs(rq.norm() - 1.0));
        }
    }
    return worst;
}

inline double geom_so4_homomorphism_max_error(std::uint64_t seed, int count = 1000) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const Quaternion u = random_unit_quaternion(rng);
        const Quaternion v = random_unit_quaternion(rng);
        worst = std::max(worst,
                         (so4_of_quat(u * v) - so4_of_quat(u) * so4_of_quat(v)).norm());
        worst = std::max(worst, std::abs(so4_of_quat(u).determinant() - 1.0));
    }
    return worst;
}

inline double geom_r_minus_one_max_error(std::size_t samples = 64) {
    const SampledLoop r = transition_loop_r(-Quaternion::one(), samples);
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double s = r.param(k);
        worst = std::max(worst,
                         std::abs(r.values(0, static_cast<Eigen::Index>(k)).real() - std::cos(s)));
        worst = std::max(worst,
                         std::abs(r.values(1, static_cast<Eigen::Index>(k)).real() + std::sin(s)));
        worst = std::max(worst, std::abs(r.values(2, static_cast<Eigen::Index>(k))));
        worst = std::max(worst, std::abs(r.values(3, static_cast<Eigen::Index>(k))));
    }
    return worst;
}

inline SuiteResult suite_geom(std::uint64_t seed) {
    SuiteResult res;
    res.check(geom_beta_max_error(seed) < 1e-12, "beta loop endpoint/sphere identities");
    res.check(geom_chart_transition_max_error(seed + 1) < 1e-12,
              "stereographic transition is quaternionic inversion");
    res.check(geom_eta_transition_max_error(seed + 2) < 1e-10,
              "eta_i = r eta_{-i} pointwise");
    res.check(geom_so4_homomorphism_max_error(seed + 3) < 1e-12,
              "so4_of_quat group homomorphism / determinant");
    res.check(geom_r_minus_one_max_error() < 1e-10, "closed form of r(-1)");

    // rotation facts
    {
        const S4Point im = rotate_r_s4(S4Point(Quaternion::i(), 0.0));
        res.check((im.z.norm() < 1e-14 && std::abs(im.y - 1.0) < 1e-14),
                  "R maps (i,0) to (0,1)");
        const S4Point jf = rotate_r_s4(S4Point(Quaternion::j(), 0.0));
        res.check((jf.z - Quaternion::j()).norm() + std::abs(jf.y) < 1e-14,
                  "R fixes the j summand");
        Rng rng(seed + 4);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            std::normal_distribution<double> g(0.0, 1.0);
            Quaternion z(g(rng), g(rng), g(rng), g(rng));
            double y = g(rng);
            const double n = std::sqrt(z.norm2() + y * y);
            S4Point p(z * (1.0 / n), y / n);
            S4Point q = rotate_r_s4(rotate_r_s4(rotate_r_s4(rotate_r_s4(p))));
            worst = std::max(worst, (q.z - p.z).norm() + std::abs(q.y - p.y));
        }
        res.check(worst < 1e-13, "fourth iterate of R is the identity");
    }
    // theta branches agree on the equator, through the class normalization
    {
        Rng rng(seed + 5);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Quaternion z = random_unit_quaternion(rng);
            const HP1Point north = HP1Point(Quaternion::one(), z);          // theta_N form
            const HP1Point south = HP1Point(z.conj(), Quaternion::one());   // theta_S form
            worst = std::max(worst, north.distance(south));
        }
        res.check(worst < 1e-12, "theta_N = theta_S on the equator as classes");
        res.check((theta_s4_to_hp1(S4Point::south()).q0 - Quaternion::one()).norm() < 1e-14,
                  "south pole maps to [1, 0]");
        res.check((theta_s4_to_hp1(S4Point::north()).q1 - Quaternion::one()).norm() < 1e-14,
                  "north pole maps to [0, 1]");
    }
    // Fourier plumbing
    {
        SampledLoop cl(2, 16);
        cl.values.setConstant(cdouble(0.5, -0.25));
        const LoopSpectrum cs = fourier_of_loop(cl);
        res.check(cs.coef.size() == 1 && cs.coef.count(0) == 1,
                  "constant loop concentrates at frequency zero");

        const SampledLoop r = transition_loop_r(-Quaternion::one(), 32);
        const LoopSpectrum rs = fourier_of_loop(r);
        bool only_pm1 = true;
        for (const auto& [f, c] : rs.coef)
            if (f != 1 && f != -1 && c.norm() > 1e-12) only_pm1 = false;
        res.check(only_pm1, "r(-1) has frequencies +-1 only");

        Rng rng(seed + 6);
        SampledLoop noisy(3, 64);
        for (Eigen::Index r2 = 0; r2 < 3; ++r2)
            for (Eigen::Index c = 0; c < 64; ++c) {
                std::normal_distribution<double> g(0.0, 1.0);
                noisy.values(r2, c) = cdouble(g(rng), g(rng));
            }
        const LoopSpectrum sp = fourier_of_loop(noisy);
        const SampledLoop back = loop_of_fourier(sp, 3, 64);
        res.check((back.values - noisy.values).norm() < 1e-10, "Fourier round trip");
        double parseval = 0.0;
        for (const auto& [f, c] : sp.coef) parseval += c.squaredNorm();
        const double mean = noisy.values.squaredNorm() / 64.0;
        res.check(std::abs(parseval - mean) < 1e-10 * std::max(1.0, mean), "Parseval identity");
    }
    return res;
}

// ---------------------------------------------------------------------------
// modes
// ---------------------------------------------------------------------------

inline FourierLoop two_plane_rotation_loop(int n) {
    // sigma(t): rotation by angle t in the (e1, e2) plane, identity elsewhere
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd rest = Eigen::MatrixXcd::Identity(n, n);
    p(0, 0) = cdouble(0.5, 0.0);
    p(0, 1) = cdouble(0.0, 0.5);
    p(1, 0) = cdouble(0.0, -0.5);
    p(1, 1) = cdouble(0.5, 0.0);
    rest(0, 0) = rest(1, 1) = 0.0;
    FourierLoop l;
    l.coef[1] = p;
    l.coef[-1] = p.conjugate();
    l.coef[0] = rest;
    return l;
}

inline SuiteResult suite_modes(std::uint64_t seed) {
    SuiteResult res;
    Rng rng(seed);

    const ModeBasis basis(2, 2);
    const LagrangianFrame frame = standard_lagrangian(basis, l_finite_rotation_plane());
    const Eigen::MatrixXcd j = frame.unitary_structure();
    const int N = basis.dim();

    // frame and projector invariants
    {
        res.check(frame.dim() == basis.n * basis.cutoff + basis.n / 2, "standard frame count");
        const Eigen::MatrixXcd jj = j * j + Eigen::MatrixXcd::Identity(N, N);
        res.check(jj.norm() < 1e-10, "J^2 = -1");
        res.check((j - basis.sigma_conjugate(j)).norm() < 1e-10, "J commutes with Sigma");
        const Eigen::MatrixXcd p = projector_pl(frame).mat;
        res.check((p * p - p).norm() < 1e-10, "P is idempotent");
        res.check((p - p.adjoint()).norm() < 1e-10, "P is self-adjoint");
        res.check((p + basis.sigma_conjugate(p) - Eigen::MatrixXcd::Identity(N, N)).norm() < 1e-10,
                  "P + Sigma P Sigma = 1");
        res.check((p * frame.columns - frame.columns).norm() < 1e-10, "P fixes L");
        res.check((p * frame.conjugate_columns()).norm() < 1e-10, "P kills Sigma(L)");
        const Eigen::MatrixXcd half =
            0.5 * (Eigen::MatrixXcd::Identity(N, N) - cdouble(0, 1) * j);
        res.check((half - p).norm() < 1e-10, "P = (1 - iJ)/2");
    }

    // multiplication operators
    {
        Eigen::MatrixXd rot(2, 2);
        rot << 0.0, -1.0, 1.0, 0.0; // constant rotation by pi/2
        const TruncatedOperator mc =
            multiplication_operator(basis, FourierLoop::constant(rot));
        res.check(mc.orthogonal && mc.commutes_with_sigma && mc.leakage == 0.0,
                  "constant loop operator flags");
        bool blockdiag = true;
        for (int q = -basis.cutoff; q <= basis.cutoff; ++q)
            for (int p2 = -basis.cutoff; p2 <= basis.cutoff; ++p2) {
                Eigen::MatrixXcd blk(2, 2);
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) blk(r, c) = mc.mat(basis.flat(p2, r), basis.flat(q, c));
                if (p2 == q && (blk - rot.cast<cdouble>()).norm() > 1e-12) blockdiag = false;
                if (p2 != q && blk.norm() > 1e-12) blockdiag = false;
            }
        res.check(blockdiag, "constant loop gives the block-diagonal operator");

        const FourierLoop tp = two_plane_rotation_loop(2);
        const TruncatedOperator mt = multiplication_operator(basis, tp);
        bool offsets_ok = true;
        for (int q = -basis.cutoff; q <= basis.cutoff; ++q)
            for (int p2 = -basis.cutoff; p2 <= basis.cutoff; ++p2) {
                if (std::abs(p2 - q) <= 1) continue;
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c)
                        if (std::abs(mt.mat(basis.flat(p2, r), basis.flat(q, c))) > 1e-12)
                            offsets_ok = false;
            }
        res.check(offsets_ok, "band-1 loop only fills offsets 0, +-1");

        // composition on the interior block where the convolution cannot escape
        const FourierLoop prod = tp * tp;
        const TruncatedOperator mp = multiplication_operator(basis, prod);
        const Eigen::MatrixXcd composed = mt.mat * mt.mat;
        double interior = 0.0;
        for (int q = -basis.cutoff; q <= basis.cutoff; ++q) {
            if (std::abs(q) > basis.cutoff - 2) continue;
            for (int p2 = -basis.cutoff; p2 <= basis.cutoff; ++p2)
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c)
                        interior = std::max(
                            interior, std::abs(mp.mat(basis.flat(p2, r), basis.flat(q, c)) -
                                               composed(basis.flat(p2, r), basis.flat(q, c))));
        }
        res.check(interior < 1e-12, "composition law on interior columns");
    }

    // commutator block pattern and cutoff stability
    {
        const FourierLoop tp = two_plane_rotation_loop(2);
        const TruncatedOperator mt = multiplication_operator(basis, tp);
        const Eigen::MatrixXcd comm = j * mt.mat - mt.mat * j;
        double pattern = 0.0;
        for (int p2 = -basis.cutoff; p2 <= basis.cutoff; ++p2)
            for (int q = -basis.cutoff; q <= basis.cutoff; ++q) {
                if (p2 == 0 || q == 0) continue; // fiber-basis-dependent rows
                Eigen::MatrixXcd blk(2, 2);
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c)
                        blk(r, c) = comm(basis.flat(p2, r), basis.flat(q, c));
                Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(2, 2);
                if (p2 * q < 0)
                    expect = cdouble(0, 2.0 * (p2 > 0 ? 1.0 : -1.0)) * tp.at(p2 - q);
                pattern = std::max(pattern, (blk - expect).norm());
            }
        res.check(pattern < 1e-12, "[J, M_sigma] block closed form off the zero modes");

        const ModeBasis big(2, 4);
        const LagrangianFrame bigframe = standard_lagrangian(big, l_finite_rotation_plane());
        const double a = hs_commutator_norm(j, mt.mat);
        const double b = hs_commutator_norm(bigframe.unitary_structure(),
                                            multiplication_operator(big, tp).mat);
        res.check(std::abs(a - b) < 1e-8, "HS commutator is cutoff stable");

        const TruncatedOperator mu = random_uvj(frame, rng);
        res.check(hs_commutator_norm(j, mu.mat) < 1e-9, "commuting operator has zero [J,g]");
    }

    // C/A calculus
    {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const TruncatedOperator g = random_real_orthogonal(basis, rng, 0.8);
            const TruncatedOperator h = random_real_orthogonal(basis, rng, 0.8);
            const auto [cg, ag] = decompose_ca(g.mat, j);
            const auto [ch, ah] = decompose_ca(h.mat, j);
            const auto [cgh, agh] = decompose_ca(g.mat * h.mat, j);
            worst = std::max(worst, (g.mat - cg - ag).norm());
            worst = std::max(worst, (cg * j - j * cg).norm());
            worst = std::max(worst, (ag * j + j * ag).norm());
            worst = std::max(worst, (cgh - cg * ch - ag * ah).norm());
            worst = std::max(worst, (agh - cg * ah - ag * ch).norm());
            worst = std::max(
                worst,
                (cg.adjoint() * cg + ag.adjoint() * ag - Eigen::MatrixXcd::Identity(N, N)).norm());
            worst = std::max(worst, (cg.adjoint() * ag + ag.adjoint() * cg).norm());
        }
        res.check(worst < 1e-10, "C/A decomposition identities");

        const TruncatedOperator u = random_uvj(frame, rng);
        const TruncatedOperator g = random_real_orthogonal(basis, rng, 0.5);
        const auto [cg, ag] = decompose_ca(g.mat, j);
        const auto [cgu, agu] = decompose_ca(g.mat * u.mat, j);
        res.check((cgu - cg * u.mat).norm() + (agu - ag * u.mat).norm() < 1e-10,
                  "right U(V_J) translation invariance of C and A");
    }

    // Z_g and the retraction
    {
        const TruncatedOperator u = random_uvj(frame, rng);
        res.check(zg(u.mat, j).norm() < 1e-9, "Z vanishes on U(V_J)");

        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const Eigen::MatrixXcd z = random_sym_sigma_l(frame, rng, 0.4);
            check_sym_properties(z, j, basis);
            const Eigen::MatrixXcd w = retract(z);
            worst = std::max(worst, (w.adjoint() * w -
                                     Eigen::MatrixXcd::Identity(N, N))
                                        .norm());
            worst = std::max(worst, (w - basis.sigma_conjugate(w)).norm());
            worst = std::max(worst, (zg(w, j) - z).norm());
        }
        res.check(worst < 1e-9, "retract is an orthogonal right inverse of Z");

        const TruncatedOperator g = random_real_orthogonal(basis, rng, 0.4);
        const Eigen::MatrixXcd z = zg(g.mat, j);
        check_sym_properties(z, j, basis);
        Eigen::VectorXcd x = random_complex_vector(rng, N), y = random_complex_vector(rng, N);
        const cdouble lhs = (y.adjoint() * (z * x))(0);
        const cdouble rhs = -((z * y).adjoint() * x)(0);
        res.check(std::abs(lhs - rhs) < 1e-10, "<Zx,y> = -<x,Zy>");
    }

    // canonical conjugator
    {
        res.check((canonical_conjugator(j, j) - Eigen::MatrixXcd::Identity(N, N)).norm() < 1e-10,
                  "canonical conjugator at K = J is the identity");
        double worst = 0.0;
        for (int i = 0; i < 25; ++i) {
            const TruncatedOperator h = random_real_orthogonal(basis, rng, 0.3);
            const Eigen::MatrixXcd k = h.mat * j * h.mat.adjoint();
            const Eigen::MatrixXcd g = canonical_conjugator(j, k);
            worst = std::max(worst, (g * j * g.adjoint() - k).norm());
            worst = std::max(
                worst,
                (g.adjoint() * g - Eigen::MatrixXcd::Identity(N, N)).norm());
        }
        res.check(worst < 1e-9, "canonical conjugator conjugates J to K");

        // continuity along a short path
        const TruncatedOperator h = random_real_orthogonal(basis, rng, 0.2);
        Eigen::MatrixXcd gprev = Eigen::MatrixXcd::Identity(N, N);
        double worststep = 0.0;
        for (int s = 1; s <= 8; ++s) {
            const double t = s / 8.0;
            const Eigen::MatrixXcd interp =
                (1.0 - t) * Eigen::MatrixXcd::Identity(N, N) + t * h.mat;
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(interp,
                                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
            const Eigen::MatrixXcd ht = svd.matrixU() * svd.matrixV().adjoint();
            const Eigen::MatrixXcd k = ht * j * ht.adjoint();
            const Eigen::MatrixXcd g = canonical_conjugator(j, k);
            if (s > 1) worststep = std::max(worststep, (g - gprev).norm());
            gprev = g;
        }
        res.check(worststep < 0.5, "canonical conjugator varies continuously");
    }
    return res;
}

// ---------------------------------------------------------------------------
// Clifford / Fock
// ---------------------------------------------------------------------------

inline double clifford_anticommutator_max_error(std::uint64_t seed, int pairs_per_config = 250) {
    Rng rng(seed);
    double worst = 0.0;
    for (int n : {2, 4})
        for (int q : {0, 1}) {
            const ModeBasis basis(n, q);
            const Eigen::MatrixXcd lf =
                (n == 2) ? l_finite_rotation_plane() : l_finite_quaternionic();
            const LagrangianFrame frame = standard_lagrangian(basis, lf);
            const FockBasisPtr fb = make_fock_basis(frame, 4);
            // columns of degree <= cap-1 are free of truncation effects
            std::vector<int> safe;
            for (int i = 0; i < fb->dim(); ++i)
                if (mask_degree(fb->masks[static_cast<std::size_t>(i)]) <= fb->degree_cap - 1)
                    safe.push_back(i);
            for (int t = 0; t < pairs_per_config; ++t) {
                const Eigen::VectorXcd v = random_real_vector(basis, rng);
                const Eigen::VectorXcd w = random_real_vector(basis, rng);
                const Eigen::MatrixXcd pv = clifford_rep(*fb, v);
                const Eigen::MatrixXcd pw = clifford_rep(*fb, w);
                const cdouble ip = (w.adjoint() * v)(0); // real for real vectors
                const Eigen::MatrixXcd anti =
                    pv * pw + pw * pv -
                    2.0 * ip * Eigen::MatrixXcd::Identity(fb->dim(), fb->dim());
                for (int i : safe) worst = std::max(worst, anti.col(i).norm());
            }
        }
    return worst;
}

inline SuiteResult suite_clifford_core(std::uint64_t seed) {
    SuiteResult res;
    Rng rng(seed);
    const ModeBasis basis(2, 1);
    const LagrangianFrame frame = standard_lagrangian(basis, l_finite_rotation_plane());
    const FockBasisPtr fb = make_fock_basis(frame, -1); // full exterior algebra, d = 3

    res.check(clifford_anticommutator_max_error(seed + 1, 40) < 1e-9,
              "Clifford anticommutator relation");

    // creators and annihilators
    {
        const FockOperator c0 = creator(fb, 0);
        const FockOperator a0 = annihilator(fb, 0);
        res.check((c0.mat.adjoint() - a0.mat).norm() < 1e-14, "annihilator is the adjoint");
        res.check((a0.mat * a0.mat).norm() < 1e-14, "a(l)^2 = 0");
        FockVector vac = FockVector::vacuum(fb);
        res.check((c0.apply(vac).amp(1) - cdouble(1, 0)) == cdouble{}, "bare wedge on vacuum");
        // a(l1)(l1 /\ l2) = l2
        FockVector w(fb);
        w.amps(fb->index(0b11)) = 1.0;
        res.check(std::abs(a0.apply(w).amp(0b10) - cdouble(1, 0)) < 1e-14,
                  "leading contraction term");
        // pi(v) Omega = sqrt2 P_L v for v = l + Sigma l
        const Eigen::VectorXcd l0 = frame.columns.col(0);
        const Eigen::VectorXcd v = l0 + basis.real_structure(l0);
        const Eigen::VectorXcd got = clifford_rep(*fb, v) * vac.amps;
        res.check(std::abs(got(fb->index(1)) - cdouble(std::sqrt(2.0), 0)) < 1e-12,
                  "pi(v) vacuum = sqrt2 l");
    }

    // Bogoliubov substitution
    {
        const TruncatedOperator g = random_real_orthogonal(basis, rng, 0.6);
        CliffordWord word;
        word.coeff = cdouble(0.7, -0.2);
        word.factors = {random_real_vector(basis, rng), random_real_vector(basis, rng)};
        TruncatedOperator idop(basis,
                               Eigen::MatrixXcd::Identity(basis.dim(), basis.dim()));
        idop.verify_flags();
        const CliffordWord same = bogoliubov(word, idop);
        res.check((rep_word(*fb, same) - rep_word(*fb, word)).norm() < 1e-12,
                  "theta_1 is the identity");

        TruncatedOperator minus(basis,
                                -Eigen::MatrixXcd::Identity(basis.dim(), basis.dim()));
        minus.verify_flags();
        const CliffordWord even = bogoliubov(word, minus);
        res.check((rep_word(*fb, even) - rep_word(*fb, word)).norm() < 1e-12,
                  "theta_{-1} fixes even words");
        CliffordWord odd;
        odd.factors = {random_real_vector(basis, rng)};
        const CliffordWord oddneg = bogoliubov(odd, minus);
        res.check((rep_word(*fb, oddneg) + rep_word(*fb, odd)).norm() < 1e-12,
                  "theta_{-1} negates odd words");

        CliffordWord single;
        single.factors = {random_real_vector(basis, rng)};
        const CliffordWord moved = bogoliubov(single, g);
        res.check((rep_word(*fb, moved) - clifford_rep(*fb, g.mat * single.factors[0])).norm() <
                      1e-12,
                  "pi(theta_g v) = pi(g v)");
    }
    return res;
}

struct FockIsometryErrors {
    double grammian = 0.0;
    double tau_isometry = 0.0;
    double tau_defining = 0.0;
    double quad_exp_bound = 0.0; // positive part of ||exp|^2 - exp(||zeta||^2)
};

inline FockIsometryErrors fock_isometry_errors(std::uint64_t seed, int zeta_count = 100) {
    Rng rng(seed);
    FockIsometryErrors err;
    const ModeBasis basis(2, 2);
    const LagrangianFrame frame = standard_lagrangian(basis, l_finite_rotation_plane());
    const FockBasisPtr fb = make_fock_basis(frame, -1); // full, d = 5

    // Grammian determinants against the enumeration inner product; the
    // factors are L-vectors given by frame coordinates
    for (int t = 0; t < 50; ++t) {
        const int k = 2 + static_cast<int>(rng() % 2);
        Eigen::MatrixXcd u(fb->modes(), k), w(fb->modes(), k);
        for (int c = 0; c < k; ++c) {
            u.col(c) = random_complex_vector(rng, fb->modes());
            w.col(c) = random_complex_vector(rng, fb->modes());
        }
        FockVector uw = FockVector::vacuum(fb);
        FockVector ww = FockVector::vacuum(fb);
        for (int c = 0; c < k; ++c) {
            uw.amps = wedge_op(*fb, u.col(c)) * uw.amps;
            ww.amps = wedge_op(*fb, w.col(c)) * ww.amps;
        }
        // both sides were built in the same (reversed) factor order, which
        // leaves the determinant identity intact
        Eigen::MatrixXcd gram(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) gram(r, c) = (w.col(c).adjoint() * u.col(r))(0);
        const cdouble direct = inner(uw, ww);
        const cdouble det = gram.determinant();
        err.grammian = std::max(err.grammian, std::abs(direct - det));
    }

    for (int t = 0; t < zeta_count; ++t) {
        const Eigen::MatrixXcd z1 = random_sym_sigma_l(frame, rng, 0.8);
        const Eigen::MatrixXcd z2 = random_sym_sigma_l(frame, rng, 0.8);
        const FockVector zeta1 = tau_inverse(z1, fb);
        const FockVector zeta2 = tau_inverse(z2, fb);
        const Eigen::MatrixXcd a1 = frame.columns.adjoint() * z1 * frame.conjugate_columns();
        const Eigen::MatrixXcd a2 = frame.columns.adjoint() * z2 * frame.conjugate_columns();
        const cdouble hs = (a2.adjoint() * a1).trace();
        err.tau_isometry = std::max(err.tau_isometry, std::abs(inner(zeta1, zeta2) - hs));

        // defining relation <zeta, x/\y> = sqrt2 <Z Sigma x, y>
        const Eigen::VectorXcd cx = random_complex_vector(rng, frame.dim());
        const Eigen::VectorXcd cy = random_complex_vector(rng, frame.dim());
        const Eigen::VectorXcd x = frame.columns * cx;
        const Eigen::VectorXcd y = frame.columns * cy;
        FockVector xv(fb), yv(fb);
        for (int m = 0; m < frame.dim(); ++m) {
            xv.amps(fb->index(mask_t{1} << m)) = cx(m);
            yv.amps(fb->index(mask_t{1} << m)) = cy(m);
        }
        const FockVector wedge_xy = wedge_product(xv, yv);
        const cdouble lhs = inner(zeta1, wedge_xy);
        const cdouble rhs =
            std::sqrt(2.0) * (y.adjoint() * (z1 * frame.basis.real_structure(x)))(0);
        err.tau_defining = std::max(err.tau_defining, std::abs(lhs - rhs));

        const QuadExpResult qe = quad_exp(zeta1);
        const double lhsn = qe.value.norm() * qe.value.norm();
        const double bound = std::exp(zeta1.norm() * zeta1.norm());
        err.quad_exp_bound = std::max(err.quad_exp_bound, lhsn - bound);
    }
    return err;
}

/// Dense oracle for the vacuum: the common null space of the annihilation
/// conditions pi_L(theta_g(conj mode))  stacked over all modes.
inline Eigen::VectorXcd vacuum_null_space(const TruncatedOperator& g, const FockBasisPtr& fb,
                                          double* second_singular = nullptr) {
    const FockBasis& b = *fb;
    Eigen::MatrixXcd stack(b.dim() * b.modes(), b.dim());
    for (int j = 0; j < b.modes(); ++j) {
        const Eigen::VectorXcd lbar = b.frame.basis.real_structure(b.frame.columns.col(j));
        stack.block(j * b.dim(), 0, b.dim(), b.dim()) = clifford_rep(b, g.mat * lbar);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stack, Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (second_singular) *second_singular = s(s.size() - 2);
    return svd.matrixV().col(s.size() - 1);
}

struct ImplementerAgreement {
    double max_pairwise = 0.0;  // canonical vs brute force, phases matched by convention
    double max_residual = 0.0;
    double max_unitary_defect = 0.0;
    bool torsor_one_dimensional = true;
};

inline ImplementerAgreement implementer_agreement(std::uint64_t seed, int count = 50) {
    Rng rng(seed);
    ImplementerAgreement agg;
    for (int t = 0; t < count; ++t) {
        const int q = (t % 2 == 0) ? 1 : 2;
        const ModeBasis basis(2, q);
        const LagrangianFrame frame = standard_lagrangian(basis, l_finite_rotation_plane());
        const FockBasisPtr fb = make_fock_basis(frame, -1); // full algebra: exact
        const TruncatedOperator g = random_real_orthogonal(basis, rng, 0.35);
        const ImplementerResult can = implementer(g, fb);
        BruteForceOptions bopts;
        BruteForceResult bf;
        try {
            bf = brute_force_implementer(g, fb, bopts);
        } catch (const DegenerateSolutionError&) {
            agg.torsor_one_dimensional = false;
            continue;
        }
        agg.max_residual = std::max(agg.max_residual, can.residual);
        agg.max_unitary_defect = std::max(agg.max_unitary_defect, bf.op.unitary_defect());
        agg.max_pairwise = std::max(agg.max_pairwise, (can.op.mat - bf.op.mat).norm() /
                                                          std::sqrt(static_cast<double>(fb->dim())));
    }
    return agg;
}

struct AlgebraicLawErrors {
    double lambda_composition = 0.0;
    double phase_homomorphism = 0.0; // | |z| - 1 | and residual of U1 U2 = z U12
    double ca_identities = 0.0;
    double zg_roundtrip = 0.0;
};

inline AlgebraicLawErrors algebraic_law_errors(std::uint64_t seed, int rounds = 12) {
    Rng rng(seed);
    AlgebraicLawErrors err;
    const ModeBasis basis(2, 1);
    const LagrangianFrame frame = standard_lagrangian(basis, l_finite_rotation_plane());
    const Eigen::MatrixXcd j = frame.unitary_structure();
    const FockBasisPtr fb = make_fock_basis(frame, -1);
    const int N = basis.dim();

    for (int t = 0; t < rounds; ++t) {
        const TruncatedOperator g1 = random_real_orthogonal(basis, rng, 0.3);
        const TruncatedOperator g2 = random_real_orthogonal(basis, rng, 0.3);
        TruncatedOperator g21(basis, g2.mat * g1.mat);
        g21.verify_flags();

        // Lambda composition against a randomized common frame of g2 g1 L
        {
            const FockOperator lam1 = lambda_g(g1, fb);
            Eigen::MatrixXcd mix(frame.dim(), frame.dim());
            for (int r = 0; r < frame.dim(); ++r) mix.col(r) = random_complex_vector(rng, frame.dim());
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(mix);
            const Eigen::MatrixXcd uq =
                qr.householderQ() * Eigen::MatrixXcd::Identity(frame.dim(), frame.dim());
            const Eigen::MatrixXcd target_cols = g2.mat * g1.mat * frame.columns * uq;
            const FockBasisPtr target =
                make_fock_basis(LagrangianFrame(basis, target_cols, 1e-8), fb->degree_cap);
            const FockOperator lam2 = lambda_g(g2, lam1.codomain, target);
            const FockOperator lam21 = lambda_g(g21, fb, target);
            err.lambda_composition =
                std::max(err.lambda_composition, (lam2.mat * lam1.mat - lam21.mat).norm());
            err.lambda_composition =
                std::max(err.lambda_composition, lam21.unitary_defect());
            // intertwining pi_{gL}(theta_g a) Lambda = Lambda pi_L(a)
            const Eigen::VectorXcd v = random_real_vector(basis, rng);
            const Eigen::MatrixXcd lhs =
                clifford_rep(*target, g21.mat * v) * lam21.mat;
            const Eigen::MatrixXcd rhs = lam21.mat * clifford_rep(*fb, v);
            err.lambda_composition = std::max(err.lambda_composition, (lhs - rhs).norm());
        }

        // implementer phase homomorphism
        {
            const ImplementerResult u1 = implementer(g1, fb);
            const ImplementerResult u2 = implementer(g2, fb);
            const Eigen::MatrixXcd prod = u1.op.mat * u2.op.mat;
            TruncatedOperator g12(basis, g1.mat * g2.mat);
            g12.verify_flags();
            const ImplementerResult u12 = implementer(g12, fb);
            const cdouble z = (u12.op.mat.adjoint() * prod).trace() /
                              static_cast<double>(fb->dim());
            err.phase_homomorphism =
                std::max(err.phase_homomorphism, std::abs(std::abs(z) - 1.0));
            err.phase_homomorphism =
                std::max(err.phase_homomorphism, (prod - z * u12.op.mat).norm());
        }

        // C/A identities and the chart round trip
        {
            const auto [c1, a1] = decompose_ca(g1.mat, j);
            err.ca_identities = std::max(
                err.ca_identities,
                (c1.adjoint() * c1 + a1.adjoint() * a1 - Eigen::MatrixXcd::Identity(N, N))
                    .norm());
            err.ca_identities =
                std::max(err.ca_identities, (c1.adjoint() * a1 + a1.adjoint() * c1).norm());
            const Eigen::MatrixXcd z = random_sym_sigma_l(frame, rng, 0.4);
            err.zg_roundtrip = std::max(err.zg_roundtrip, (zg(retract(z), j) - z).norm());
        }
    }
    return err;
}

struct StabilityErrors {
    double iso_unitary = 0.0;
    double inner_product_identity = 0.0;
    double clifford_linearity = 0.0;
    double tensor_intertwiner = 0.0;
    double parity_mixing = 0.0;
};

inline double parity_mixing_norm(const Eigen::MatrixXcd& t, const FockBasis& dom,
                                 const FockBasis& cod) {
    // smaller of the parity-preserving and parity-reversing violation
    double keep = 0.0, swap = 0.0;
    for (int c = 0; c < t.cols(); ++c)
        for (int r = 0; r < t.rows(); ++r) {
            const int pd = mask_degree(dom.masks[static_cast<std::size_t>(c)]) % 2;
            const int pc = mask_degree(cod.masks[static_cast<std::size_t>(r)]) % 2;
            const double m = std::norm(t(r, c));
            if (pd == pc)
                swap += m;
            else
                keep += m;
        }
    return std::sqrt(std::min(keep, swap));
}

inline StabilityErrors stability_errors(std::uint64_t seed) {
    Rng rng(seed);
    StabilityErrors err;
    const ModeBasis basis(2, 1);
    const LagrangianFrame frame = standard_lagrangian(basis, l_finite_rotation_plane());
    // block 1: first two frame columns, block 2: the third
    const Eigen::MatrixXcd f1 = frame.columns.leftCols(2);
    const Eigen::MatrixXcd f2 = frame.columns.rightCols(1);
    const LagrangianFrame fr1(basis, f1, 1e-9);
    const LagrangianFrame fr2(basis, f2, 1e-9);
    const FockBasisPtr fb1 = make_fock_basis(fr1, -1);
    const FockBasisPtr fb2 = make_fock_basis(fr2, -1);
    const FockBasisPtr fb12 = make_fock_basis(frame, -1);
    const TensorBasis tb(fb1, fb2);
    const FockOperator iso = fock_sum_iso(tb, fb12);

    err.iso_unitary = (iso.mat.adjoint() * iso.mat -
                       Eigen::MatrixXcd::Identity(tb.dim(), tb.dim()))
                          .norm();

    // vacuum (x) vacuum -> vacuum, and inner products of random decomposables
    {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(tb.dim());
        v(tb.index_of.at(TensorBasis::key(0, 0))) = 1.0;
        Eigen::VectorXcd img = iso.mat * v;
        err.inner_product_identity =
            std::max(err.inner_product_identity,
                     std::abs(img(fb12->index(0)) - cdouble(1, 0)));
        for (int t = 0; t < 40; ++t) {
            const Eigen::VectorXcd a = random_complex_vector(rng, tb.dim());
            const Eigen::VectorXcd b = random_complex_vector(rng, tb.dim());
            const cdouble lhs = ((iso.mat * b).adjoint() * (iso.mat * a))(0);
            const cdouble rhs = (b.adjoint() * a)(0);
            err.inner_product_identity = std::max(err.inner_product_identity,
                                                  std::abs(lhs - rhs));
        }
    }

    // Clifford linearity of the graded tensor action through the iso
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXcd c1 = random_complex_vector(rng, 2);
        Eigen::VectorXcd c2 = random_complex_vector(rng, 1);
        const Eigen::VectorXcd v1part = f1 * c1;
        const Eigen::VectorXcd v2part = f2 * c2;
        const Eigen::VectorXcd v1 = v1part + basis.real_structure(v1part);
        const Eigen::VectorXcd v2 = v2part + basis.real_structure(v2part);
        const Eigen::MatrixXcd lhs = iso.mat * tensor_clifford_rep(tb, v1, v2);
        const Eigen::MatrixXcd rhs = clifford_rep(*fb12, v1 + v2) * iso.mat;
        err.clifford_linearity = std::max(err.clifford_linearity, (lhs - rhs).norm());
    }

    // tensor with an intertwiner: block-2 conjugate frame, brute-force T
    {
        const LagrangianFrame fr2c(basis, fr2.conjugate_columns(), 1e-9);
        const FockBasisPtr fb2c = make_fock_basis(fr2c, -1);
        // solve T pi_{L2}(x) = pi_{L2'}(x) T over a real basis of the block
        const Eigen::VectorXcd e1 = f2.col(0) + basis.real_structure(f2.col(0));
        const Eigen::VectorXcd e2 =
            cdouble(0, 1) * f2.col(0) + basis.real_structure(cdouble(0, 1) * f2.col(0));
        const int dm = fb2->dim();
        Eigen::MatrixXcd sys(2 * dm * dm, dm * dm);
        int row = 0;
        for (const Eigen::VectorXcd& x : {e1, e2}) {
            const Eigen::MatrixXcd pl = clifford_rep(*fb2, x);
            const Eigen::MatrixXcd pk = clifford_rep(*fb2c, x);
            for (int rr = 0; rr < dm; ++rr)
                for (int cc = 0; cc < dm; ++cc) {
                    // (T pi_L - pi_K T)(rr, cc) = 0 in column-major unknowns
                    Eigen::RowVectorXcd eq = Eigen::RowVectorXcd::Zero(dm * dm);
                    for (int m = 0; m < dm; ++m) eq(m * dm + rr) += pl(m, cc);
                    for (int m = 0; m < dm; ++m) eq(cc * dm + m) -= pk(rr, m);
                    sys.row(row++) = eq;
                }
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys, Eigen::ComputeThinV);
        Eigen::VectorXcd tvec = svd.matrixV().col(dm * dm - 1);
        Eigen::MatrixXcd theta(dm, dm);
        for (int cc = 0; cc < dm; ++cc)
            for (int rr = 0; rr < dm; ++rr) theta(rr, cc) = tvec(cc * dm + rr);
        theta *= std::sqrt(static_cast<double>(dm)) / theta.norm();

        const TensorBasis tbc(fb1, fb2c);
        const LagrangianFrame merged(basis,
                                     (Eigen::MatrixXcd(basis.dim(), 3) << f1,
                                      fr2c.columns)
                                         .finished(),
                                     1e-9);
        const FockBasisPtr fb12c = make_fock_basis(merged, -1);
        const FockOperator isoc = fock_sum_iso(tbc, fb12c);
        // id (x) theta on tensor enumerations
        Eigen::MatrixXcd idth = Eigen::MatrixXcd::Zero(tbc.dim(), tb.dim());
        for (int col = 0; col < tb.dim(); ++col) {
            const auto [i, k] = tb.pairs[static_cast<std::size_t>(col)];
            for (int k2 = 0; k2 < dm; ++k2)
                idth(tbc.index_of.at(TensorBasis::key(i, k2)), col) += theta(k2, k);
        }
        const Eigen::MatrixXcd conj_iso = isoc.mat * idth * iso.mat.adjoint();
        for (int t = 0; t < 10; ++t) {
            const Eigen::VectorXcd v = random_real_vector(basis, rng);
            const Eigen::MatrixXcd lhs = conj_iso * clifford_rep(*fb12, v);
            const Eigen::MatrixXcd rhs = clifford_rep(*fb12c, v) * conj_iso;
            err.tensor_intertwiner = std::max(err.tensor_intertwiner, (lhs - rhs).norm());
        }
        err.parity_mixing =
            std::max(err.parity_mixing, parity_mixing_norm(theta, *fb2, *fb2c));
        err.parity_mixing =
            std::max(err.parity_mixing, parity_mixing_norm(conj_iso, *fb12, *fb12c));
    }
    return err;
}

inline SuiteResult suite_clifford(std::uint64_t seed) {
    SuiteResult res = suite_clifford_core(seed);
    Rng rng(seed + 100);

    const FockIsometryErrors iso = fock_isometry_errors(seed + 1, 30);
    res.check(iso.grammian < 1e-9, "Grammian determinant inner product");
    res.check(iso.tau_isometry < 1e-9, "tau isometry");
    res.check(iso.tau_defining < 1e-9, "tau defining relation");
    res.check(iso.quad_exp_bound < 1e-9, "quadratic exponential norm bound");

    // quad_exp exactness on a decomposable and parity
    {
        const ModeBasis basis(2, 1);
        const LagrangianFrame frame = standard_lagrangian(basis, l_finite_rotation_plane());
        const FockBasisPtr fb = make_fock_basis(frame, -1);
        FockVector zeta(fb);
        zeta.amps(fb->index(0b11)) = cdouble(0.3, 0.4);
        const QuadExpResult qe = quad_exp(zeta);
        res.check(std::abs(qe.value.amp(0) - cdouble(1, 0)) < 1e-14 &&
                      std::abs(qe.value.amp(0b11) - zeta.amp(0b11)) < 1e-14 &&
                      qe.dropped_mass == 0.0,
                  "exp of a decomposable is 1 + zeta");
        res.check(parity(qe.value) == Parity::Even, "quadratic exponential is even");
        res.check(parity(FockVector::vacuum(fb)) == Parity::Even, "vacuum parity");
        FockVector odd(fb);
        odd.amps(fb->index(1)) = 1.0;
        res.check(parity(odd) == Parity::Odd, "single mode parity");

        // vacuum facts
        const TruncatedOperator u = random_uvj(frame, rng);
        const VacuumResult vu = vacuum_vector(u, fb);
        res.check((vu.vec.amps - FockVector::vacuum(fb).amps).norm() < 1e-9,
                  "U(V_J) vacuum is Omega");
        TruncatedOperator idop(basis, Eigen::MatrixXcd::Identity(basis.dim(), basis.dim()));
        idop.verify_flags();
        res.check((vacuum_vector(idop, fb).vec.amps - FockVector::vacuum(fb).amps).norm() <
                      1e-12,
                  "identity vacuum is Omega");

        // two-mode rotation vacuum against the dense null-space oracle
        const FiberFamily synth = synthetic_family(frame);
        const Quaternion x(std::cos(0.7), 0.0, std::sin(0.7) * std::cos(0.4),
                           std::sin(0.7) * std::sin(0.4));
        const TruncatedOperator grot = synth.op_of(x);
        const VacuumResult vrot = vacuum_vector(grot, fb);
        double second = 0.0;
        const Eigen::VectorXcd null = vacuum_null_space(grot, fb, &second);
        const cdouble align = (null.adjoint() * vrot.vec.amps)(0);
        res.check(second > 1e-6, "annihilation system has a one-dimensional kernel");
        res.check((vrot.vec.amps - align / std::abs(align) * null).norm() < 1e-9,
                  "exponential vacuum matches the null-space oracle");
        res.check(vacuum_condition_residual(synth.vacuum_of(x), grot, frame) < 1e-9,
                  "product-form vacuum satisfies the vacuum condition");

        // implementer facts
        const ImplementerResult uid = implementer(idop, fb);
        res.check((uid.op.mat - Eigen::MatrixXcd::Identity(fb->dim(), fb->dim())).norm() < 1e-10,
                  "implementer of the identity");
        const ImplementerResult uu = implementer(u, fb);
        const Eigen::MatrixXcd lam =
            exterior_minor_matrix(frame.columns.adjoint() * u.mat * frame.columns, *fb, *fb);
        res.check((uu.op.mat - lam).norm() < 1e-9, "U(V_J) implementer is Lambda_g");
        res.check(uu.residual < 1e-9, "U(V_J) implementer residual");

        // pair vacuum against the dense route
        const PairVacuumResult pv = pair_vacuum_of(grot, frame);
        const FockVector dense = pair_vacuum_to_fock(pv.vac, fb);
        const cdouble ip = inner(dense, vrot.vec);
        res.check(std::abs(ip - cdouble(1, 0)) < 1e-9 && pv.youla_residual < 1e-10,
                  "pair-form vacuum equals the exponential vacuum");
        const cdouble ov = pair_vacuum_overlap(pv.vac, pv.vac);
        res.check(std::abs(ov - cdouble(1, 0)) < 1e-10, "pair vacuum overlap normalization");
    }

    const ImplementerAgreement agree = implementer_agreement(seed + 2, 10);
    res.check(agree.torsor_one_dimensional, "torsor one-dimensionality");
    res.check(agree.max_pairwise < 1e-8, "canonical vs brute-force implementer");
    res.check(agree.max_residual < 1e-8, "implementer intertwining residual");

    const AlgebraicLawErrors law = algebraic_law_errors(seed + 3, 6);
    res.check(law.lambda_composition < 1e-9, "Lambda composition and intertwining");
    res.check(law.phase_homomorphism < 1e-9, "implementer phase homomorphism");
    res.check(law.ca_identities < 1e-9, "orthogonality C/A identities");
    res.check(law.zg_roundtrip < 1e-9, "zg/retract round trip");

    const StabilityErrors st = stability_errors(seed + 4);
    res.check(st.iso_unitary < 1e-9, "Fock sum iso unitarity");
    res.check(st.inner_product_identity < 1e-9, "Fock sum inner product identity");
    res.check(st.clifford_linearity < 1e-9, "Fock sum Clifford linearity");
    res.check(st.tensor_intertwiner < 1e-8, "tensor with an intertwiner stays Clifford linear");
    res.check(st.parity_mixing < 1e-10, "parity dichotomy of intertwiners");
    return res;
}

// ---------------------------------------------------------------------------
// torsors
// ---------------------------------------------------------------------------

inline SuiteResult suite_torsor(std::uint64_t seed) {
    SuiteResult res;
    Rng rng(seed);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    auto phase = [&] { return std::exp(cdouble(0.0, ang(rng))); };

    const PhaseElement t(phase(), "T");
    const PhaseElement s(phase(), "T");
    res.check(std::abs(torsor_pair(t, t) - cdouble(1, 0)) < 1e-13, "pair(t,t) = 1");
    const cdouble z = phase();
    res.check(std::abs(torsor_pair(torsor_scale(z, t), t) - z) < 1e-13, "pair(zt,t) = z");
    res.check(std::abs(torsor_pair(torsor_scale(z, t), s) - z * torsor_pair(t, s)) < 1e-13,
              "pairing equivariance");

    res.check(std::abs(torsor_dual_pairing(torsor_dual(t), t) - cdouble(1, 0)) < 1e-13,
              "t* (x) t maps to 1");
    res.check(torsor_dual(torsor_dual(t)).tag == "dual(dual(T))" &&
                  std::abs(torsor_dual(torsor_dual(t)).value - t.value) < 1e-13,
              "double dual returns the element");
    res.check(std::abs(torsor_dual(torsor_scale(z, t)).value -
                       std::conj(z) * torsor_dual(t).value) < 1e-13,
              "(zt)* = conj(z) t*");
    const PhaseElement u(phase(), "U");
    res.check(std::abs(torsor_tensor(torsor_scale(z, t), u).value -
                       torsor_tensor(t, torsor_scale(z, u)).value) < 1e-13,
              "tensor balance");
    bool threw = false;
    try {
        torsor_pair(t, u);
    } catch (const TagMismatchError&) {
        threw = true;
    }
    res.check(threw, "tag mismatch raises");

    // representation (x) torsor
    {
        const ModeBasis basis(2, 0);
        const LagrangianFrame frame = standard_lagrangian(basis, l_finite_rotation_plane());
        const FockBasisPtr fb = make_fock_basis(frame, -1);
        FockVector f(fb), g(fb);
        f.amps = random_complex_vector(rng, fb->dim());
        g.amps = random_complex_vector(rng, fb->dim());
        res.check(std::abs(rep_tensor_inner(f, t, f, t) -
                           cdouble(f.norm() * f.norm(), 0)) < 1e-12,
                  "norm of f (x) t equals norm of f");
        res.check(std::abs(rep_tensor_inner(f, t, g, torsor_scale(z, t)) -
                           std::conj(z) * inner(f, g)) < 1e-12,
                  "<f (x) t, g (x) zt> = conj(z) <f,g>");
        // class identity (zf) (x) t = f (x) (zt)
        FockVector zf(fb);
        zf.amps = z * f.amps;
        const PhaseElement probe(phase(), "T");
        res.check(std::abs(rep_tensor_inner(zf, t, g, probe) -
                           rep_tensor_inner(f, torsor_scale(z, t), g, probe)) < 1e-12,
                  "(zf) (x) t ~ f (x) (zt)");
    }
    return res;
}

// ---------------------------------------------------------------------------
// Cech machinery
// ---------------------------------------------------------------------------

inline CoverPtr triple_cover(int circle_samples = 0) {
    auto cover = std::make_shared<IndexedCover>();
    cover->indices = {2, 3, 4};
    const GridDesc g = circle_samples > 0 ? GridDesc::circle(circle_samples)
                                          : GridDesc::constant();
    for (int i : cover->indices) cover->nerve[{i}] = g;
    cover->nerve[{2, 3}] = g;
    cover->nerve[{2, 4}] = g;
    cover->nerve[{3, 4}] = g;
    cover->nerve[{2, 3, 4}] = g;
    cover->validate();
    return cover;
}

inline U1Fn random_u1(Rng& rng, const GridDesc& g) {
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    if (g.kind == GridDesc::Kind::Const) return U1Fn::constant(std::exp(cdouble(0, ang(rng))));
    Eigen::VectorXcd v(g.samples);
    // band-limited so winding handling stays smooth
    const double a = ang(rng), b = 0.3 * ang(rng) / kTwoPi;
    for (int k = 0; k < g.samples; ++k) {
        const double s = kTwoPi * k / g.samples;
        v(k) = std::exp(cdouble(0, a + b * std::sin(s)));
    }
    return U1Fn::circle(v);
}

inline SuiteResult suite_cech(std::uint64_t seed) {
    SuiteResult res;
    Rng rng(seed);

    // delta delta = 1 on random 0-cochains, constant and circle-valued
    for (int pass = 0; pass < 2; ++pass) {
        const CoverPtr cover = triple_cover(pass == 0 ? 0 : 16);
        CechCochain c(cover, 0);
        for (int i : cover->indices) c.set({i}, random_u1(rng, cover->grid({i})));
        const CechCochain dc = cech_coboundary(c);
        const CechCochain ddc = cech_coboundary(dc);
        double worst = 0.0;
        for (const auto& [t, f] : ddc.entries) worst = std::max(worst, f.dist(U1Fn::one()));
        res.check(worst < 1e-12, "delta delta = 1");
        // 2-set specialization: (delta h)_{01} = h_1 h_0^{-1}
        const U1Fn expect = c.value({3}) * c.value({2}).inverse();
        res.check(dc.value({2, 3}).dist(expect) < 1e-12, "two-set coboundary formula");
        CechCochain ones(cover, 0);
        for (int i : cover->indices) ones.set({i}, U1Fn::one());
        res.check(cech_coboundary(ones).is_trivial(1e-14), "delta of constant 1 is 1");
    }

    // Dixmier-Douady: canonical trivial sections, rescaling, cocycle law
    {
        const CoverPtr cover = triple_cover(8);
        std::map<int, U1Fn> eta;
        for (int i : cover->indices) eta[i] = random_u1(rng, GridDesc::circle(8));
        SectionFamily sections;
        for (int i : cover->indices)
            for (int j2 : cover->indices)
                if (i < j2) sections.set(i, j2, eta[i] * eta[j2].inverse());
        const CechCochain g = dd_cocycle(cover, sections);
        res.check(g.is_trivial(1e-12), "canonical trivial sections give g = 1");
        res.check(cocycle_defect(g) < 1e-12, "trivial cocycle condition");

        // rescaling by h changes g by the predicted coboundary
        std::map<std::pair<int, int>, U1Fn> h;
        SectionFamily rescaled;
        for (int i : cover->indices)
            for (int j2 : cover->indices)
                if (i < j2) {
                    h[{i, j2}] = random_u1(rng, GridDesc::circle(8));
                    rescaled.set(i, j2, h[{i, j2}] * sections.get(i, j2));
                }
        const CechCochain g2 = dd_cocycle(cover, rescaled);
        double worst = 0.0;
        const Tuple t{2, 3, 4};
        const U1Fn predicted = h[{3, 4}] * h[{2, 4}].inverse() * h[{2, 3}];
        worst = std::max(worst, g2.value(t).dist(g.value(t) * predicted));
        res.check(worst < 1e-12, "section rescaling shifts g by the coboundary of h");
        res.check(cocycle_defect(g2) < 1e-12, "rescaled cocycle condition");
        // alternation
        res.check(g2.value({3, 2, 4}).dist(g2.value({2, 3, 4}).inverse()) < 1e-12,
                  "cocycle alternates under transpositions");
        res.check(g2.value({2, 2, 4}).is_one(1e-14), "non-injective tuples carry 1");

        // inverse convention enforcement
        SectionFamily bad;
        bad.set(2, 3, random_u1(rng, GridDesc::circle(8)));
        bad.set(3, 2, random_u1(rng, GridDesc::circle(8)));
        bool threw = false;
        try {
            bad.check_inverse_convention();
        } catch (const InverseConventionError&) {
            threw = true;
        }
        res.check(threw, "sigma_ji must invert sigma_ij");
    }

    // principal bundle coboundary
    {
        BundleCochain g0;
        g0.charts = {0, 1};
        g0.grid = GridDesc::circle(8);
        g0.arity = 1;
        g0.values[{0}] = random_u1(rng, g0.grid);
        g0.values[{1}] = random_u1(rng, g0.grid);
        const BundleCochain d1 = delta_bundle_cochain(g0);
        res.check(d1.value({0, 1}).dist(g0.values[{1}] * g0.values[{0}].inverse()) < 1e-12,
                  "two-chart coboundary pattern");
        const BundleCochain d2 = delta_bundle_cochain(d1);
        double worst = 0.0;
        for (const auto& [t, f] : d2.values) worst = std::max(worst, f.dist(U1Fn::one()));
        res.check(worst < 1e-12, "bundle coboundary squares to 1");
        BundleCochain cg;
        cg.charts = {0, 1, 2};
        cg.grid = GridDesc::constant();
        cg.arity = 1;
        const U1Fn cf = random_u1(rng, cg.grid);
        for (int c : cg.charts) cg.values[{c}] = cf;
        const BundleCochain dcg = delta_bundle_cochain(cg);
        double tele = 0.0;
        for (const auto& [t, f] : dcg.values) tele = std::max(tele, f.dist(U1Fn::one()));
        res.check(tele < 1e-13, "constant telescoping for even arity");
    }

    // suspension cover and the chase
    {
        auto base = std::make_shared<IndexedCover>();
        base->indices = {2, 3, 4, 5}; // four arcs of a circle
        const GridDesc g = GridDesc::circle(32);
        for (int i : base->indices) base->nerve[{i}] = g;
        base->nerve[{2, 3}] = g;
        base->nerve[{3, 4}] = g;
        base->nerve[{4, 5}] = g;
        base->nerve[{2, 5}] = g;
        base->validate();
        const SuspensionCover sc = build_suspension_cover(*base);
        res.check(sc.sigma->indices.size() == 6, "suspension index set is {+-1} plus I");
        res.check(!sc.sigma->nonempty({-1, 1}), "caps do not meet");
        res.check(sc.sigma->nonempty({-1, 2, 3}) && sc.sigma->nonempty({1, 4, 5}),
                  "caps meet the extruded sets");
        res.check(!sc.cone_minus->nonempty({1}) && !sc.cone_plus->nonempty({-1}),
                  "cone restrictions empty the far cap");
        res.check(!sc.base_restriction->nonempty({-1, 2}) && sc.base_restriction->nonempty({2, 3}),
                  "restriction to X drops cap tuples");

        // winding-1 cocycle: transition data of the degree-1 circle bundle
        CechCochain h(sc.base_restriction, 1);
        Eigen::VectorXcd wind(32);
        for (int k = 0; k < 32; ++k) wind(k) = std::exp(cdouble(0, kTwoPi * k / 32.0));
        h.set({2, 3}, U1Fn::circle(wind));
        h.set({3, 4}, random_u1(rng, g));
        h.set({4, 5}, random_u1(rng, g));
        // close up the cocycle: the loop product must be a coboundary pattern;
        // on a circle nerve with no triples, any pair data is a cocycle
        h.set({2, 5}, random_u1(rng, g));
        res.check(cocycle_defect(h) < 1e-12, "circle-nerve 1-cochains are cocycles");

        const CechCochain gsig = suspension_forward(h, sc);
        res.check(gsig.value({-1, 2, 3}).dist(h.value({2, 3})) < 1e-13,
                  "forward chase concentrates on the minus cap");
        const CechCochain hback = suspension_partial_inverse(gsig, sc);
        res.check(hback.dist(h) < 1e-12, "suspension round trip is exact");
        res.check(winding_degree(hback.value({2, 3})) == 1, "degree survives the round trip");

        CechCochain trivial(sc.sigma, 2);
        const CechCochain htriv = suspension_partial_inverse(trivial, sc);
        res.check(htriv.is_trivial(1e-14), "trivial cocycle inverts to trivial");

        CechCochain badsupp(sc.sigma, 2);
        badsupp.entries[{1, 2, 3}] = random_u1(rng, g);
        bool threw = false;
        try {
            suspension_partial_inverse(badsupp, sc);
        } catch (const SupportShapeError&) {
            threw = true;
        }
        res.check(threw, "unsupported shapes are rejected");
    }

    // winding numbers
    {
        res.check(winding_degree(U1Fn::constant(cdouble(0, 1))) == 0, "constant winds zero");
        Eigen::VectorXcd one(64), two(64);
        for (int k = 0; k < 64; ++k) {
            one(k) = std::exp(cdouble(0, kTwoPi * k / 64.0));
            two(k) = std::exp(cdouble(0, 2.0 * kTwoPi * k / 64.0));
        }
        res.check(winding_degree(U1Fn::circle(one)) == 1, "e^{is} winds once");
        res.check(winding_degree(U1Fn::circle(one) * U1Fn::circle(two)) == 3,
                  "degree is additive");
        Eigen::VectorXcd dense(128);
        for (int k = 0; k < 128; ++k)
            dense(k) = std::exp(cdouble(0, kTwoPi * k / 128.0));
        res.check(winding_degree(U1Fn::circle(dense)) == 1, "refinement stability");
        Eigen::VectorXcd coarse(8);
        for (int k = 0; k < 8; ++k) coarse(k) = std::exp(cdouble(0, 4.0 * kTwoPi * k / 8.0));
        bool threw = false;
        try {
            winding_degree(U1Fn::circle(coarse));
        } catch (const RefineError&) {
            threw = true;
        }
        res.check(threw, "undersampling raises RefineError");
    }
    return res;
}

inline SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "geom") return suite_geom(seed);
    if (name == "modes") return suite_modes(seed);
    if (name == "clifford") return suite_clifford(seed);
    if (name == "torsor") return suite_torsor(seed);
    if (name == "cech") return suite_cech(seed);
    if (name == "all") {
        SuiteResult all;
        all.merge(suite_geom(seed));
        all.merge(suite_modes(seed + 1));
        all.merge(suite_clifford(seed + 2));
        all.merge(suite_torsor(seed + 3));
        all.merge(suite_cech(seed + 4));
        return all;
    }
    throw Error("unknown suite: " + name);
}

} // namespace fockgerbe::suites
