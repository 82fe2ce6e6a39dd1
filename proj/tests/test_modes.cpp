#include <catch2/catch_amalgamated.hpp>

#include "fockgerbe/modes.hpp"
#include "fockgerbe/suites.hpp"

using namespace fockgerbe;

TEST_CASE("mode basis bookkeeping") {
    const ModeBasis b(2, 2);
    CHECK(b.dim() == 10);
    CHECK(b.flat(-2, 0) == 0);
    CHECK(b.freq_of(b.flat(1, 1)) == 1);
    CHECK(b.fiber_of(b.flat(1, 1)) == 1);
    CHECK_THROWS(ModeBasis(3, 1)); // odd fiber dimension

    // Sigma is an antilinear involution
    Rng rng(1);
    const Eigen::VectorXcd v = random_complex_vector(rng, b.dim());
    CHECK((b.real_structure(b.real_structure(v)) - v).norm() < 1e-14);
    const Eigen::MatrixXcd r = b.real_coordinate_frame();
    CHECK((r.adjoint() * r - Eigen::MatrixXcd::Identity(b.dim(), b.dim())).norm() < 1e-13);
    for (int c = 0; c < b.dim(); ++c)
        CHECK((b.real_structure(r.col(c)) - r.col(c)).norm() < 1e-13);
}

TEST_CASE("standard Lagrangian dimensions and validation") {
    const ModeBasis b2(2, 0);
    const LagrangianFrame f0 = standard_lagrangian(b2, l_finite_rotation_plane());
    CHECK(f0.dim() == 1);
    const ModeBasis b21(2, 1);
    CHECK(standard_lagrangian(b21, l_finite_rotation_plane()).dim() == 3);

    // a non-isotropic L_finite must be rejected
    Eigen::MatrixXcd bad(2, 1);
    bad << cdouble(1, 0), cdouble(0, 0);
    CHECK_THROWS_AS(standard_lagrangian(b2, bad), NotLagrangianError);

    const ModeBasis b4(4, 1);
    const LagrangianFrame f4 = standard_lagrangian(b4, l_finite_quaternionic());
    CHECK(f4.dim() == 6);
    // quaternion-compatible choice: constant left multiplications commute with J
    Rng rng(8);
    const Quaternion u = random_unit_quaternion(rng);
    const TruncatedOperator g =
        multiplication_operator(b4, FourierLoop::constant(so4_of_quat(u)));
    CHECK(hs_commutator_norm(f4.unitary_structure(), g.mat) < 1e-10);
}

TEST_CASE("multiplication operator leakage and strict mode") {
    const ModeBasis b(2, 1);
    const FourierLoop tp = suites::two_plane_rotation_loop(2);
    const TruncatedOperator m = multiplication_operator(b, tp);
    CHECK(m.leakage > 0.1); // band-1 loop at Q=1 drops edge mass
    MultiplicationOptions strict;
    strict.strict = true;
    CHECK_THROWS_AS(multiplication_operator(b, tp, strict), BandTooWideError);

    MultiplicationOptions ortho;
    ortho.orthogonalize = true;
    const TruncatedOperator mo = multiplication_operator(b, tp, ortho);
    CHECK(mo.orthogonal_defect() < 1e-12);
    CHECK(mo.real_defect() < 1e-12);
}

TEST_CASE("zg boundaries") {
    const ModeBasis b(2, 1);
    const LagrangianFrame f = standard_lagrangian(b, l_finite_rotation_plane());
    const Eigen::MatrixXcd j = f.unitary_structure();

    // a fully rotated mode pair makes C singular
    Rng rng(3);
    const Eigen::MatrixXcd z = random_sym_sigma_l(f, rng, 0.5);
    const Eigen::MatrixXcd w = retract(z);
    CHECK_NOTHROW(zg(w, j));
    // push the rotation to the C-kernel: swap a mode with its conjugate
    Eigen::MatrixXcd swap = Eigen::MatrixXcd::Identity(b.dim(), b.dim());
    const Eigen::VectorXcd l0 = f.columns.col(0);
    const Eigen::VectorXcd l0b = b.real_structure(l0);
    swap -= l0 * l0.adjoint() + l0b * l0b.adjoint();
    swap += l0b * l0.adjoint() + l0 * l0b.adjoint();
    CHECK_THROWS_AS(zg(swap, j), SingularCError);
    try {
        zg(swap, j);
    } catch (const SingularCError& e) {
        CHECK(e.smallest_singular_value < 1e-12);
    }

    check_sym_properties(z, j, b);
    Eigen::MatrixXcd notsym = z;
    notsym(0, 0) += 0.1;
    CHECK_THROWS_AS(check_sym_properties(notsym, j, b), NotSymError);
}

TEST_CASE("canonical conjugator rejects antipodal structures") {
    const ModeBasis b(2, 0);
    const LagrangianFrame f = standard_lagrangian(b, l_finite_rotation_plane());
    const Eigen::MatrixXcd j = f.unitary_structure();
    CHECK_THROWS_AS(canonical_conjugator(j, -j), TooFarError);
}

TEST_CASE("small two-mode rotation has the closed-form Z") {
    // g mixing one mode with its conjugate by angle theta:
    // C = cos(theta) on the pair, A maps the conjugate in with sin(theta),
    // and Z is the rank-2 antisymmetric block with entry tan(theta)
    const ModeBasis b(2, 1);
    const LagrangianFrame f = standard_lagrangian(b, l_finite_rotation_plane());
    const Eigen::MatrixXcd jm = f.unitary_structure();
    const double theta = 0.3;
    const Eigen::VectorXcd l1 = f.columns.col(0), l2 = f.columns.col(1);
    const Eigen::VectorXcd l1b = b.real_structure(l1), l2b = b.real_structure(l2);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(b.dim(), b.dim());
    const double co = std::cos(theta), si = std::sin(theta);
    g += (co - 1.0) * (l1 * l1.adjoint() + l2 * l2.adjoint() + l1b * l1b.adjoint() +
                       l2b * l2b.adjoint());
    g += -si * (l2b * l1.adjoint()) + si * (l1b * l2.adjoint());
    g += -si * (l2 * l1b.adjoint()) + si * (l1 * l2b.adjoint());
    const Eigen::MatrixXcd z = zg(g, jm);
    // <Z l1bar, l2> = tan(theta)
    const cdouble entry = (l2.adjoint() * (z * l1b))(0);
    CHECK(std::abs(entry - cdouble(std::tan(theta), 0)) < 1e-12);
    CHECK((z * l1 - std::tan(theta) * l2b).norm() < 1e-12);
    CHECK(z.norm() == Catch::Approx(2.0 * std::tan(theta)).epsilon(1e-10));
}

TEST_CASE("randomized modes suite") {
    const auto res = suites::suite_modes(77);
    for (const auto& f : res.failures) UNSCOPED_INFO(f);
    CHECK(res.failures.empty());
}
