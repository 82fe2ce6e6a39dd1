#include <catch2/catch_amalgamated.hpp>

#include "fockgerbe/fock.hpp"
#include "fockgerbe/pair_vacuum.hpp"
#include "fockgerbe/suites.hpp"

using namespace fockgerbe;

namespace {
FockBasisPtr small_basis(int n = 2, int q = 1, int cap = -1) {
    const ModeBasis basis(n, q);
    const Eigen::MatrixXcd lf = (n == 2) ? l_finite_rotation_plane() : l_finite_quaternionic();
    return make_fock_basis(standard_lagrangian(basis, lf), cap);
}
} // namespace

TEST_CASE("enumeration order and cap") {
    const FockBasisPtr fb = small_basis(2, 1, 2);
    // degree-lexicographic: {} < {1} < {2} < {3} < {1,2} < {1,3} < {2,3}
    REQUIRE(fb->dim() == 7);
    CHECK(fb->masks[0] == 0);
    CHECK(fb->masks[1] == 0b001);
    CHECK(fb->masks[4] == 0b011);
    CHECK(fb->masks[5] == 0b101);
    CHECK(fb->masks[6] == 0b110);
    CHECK_FALSE(fb->has(0b111));
}

TEST_CASE("merge signs") {
    CHECK(merge_sign(0b001, 0b010) == 1);  // l1 /\ l2 in order
    CHECK(merge_sign(0b010, 0b001) == -1); // l2 /\ l1 swaps once
    CHECK(merge_sign(0b101, 0b010) == -1); // inserting l2 past l3
}

TEST_CASE("creator, annihilator, clifford square") {
    const FockBasisPtr fb = small_basis();
    Rng rng(12);
    const Eigen::VectorXcd v = random_real_vector(fb->frame.basis, rng);
    const Eigen::MatrixXcd pv = clifford_rep(*fb, v);
    CHECK((pv - pv.adjoint()).norm() < 1e-12); // self-adjoint on real vectors
    const Eigen::MatrixXcd sq = pv * pv;
    const double n2 = v.squaredNorm();
    CHECK((sq - n2 * Eigen::MatrixXcd::Identity(fb->dim(), fb->dim())).norm() < 1e-10);
}

TEST_CASE("lambda pushforward and explicit frames") {
    const FockBasisPtr fb = small_basis();
    Rng rng(13);
    const TruncatedOperator g = random_real_orthogonal(fb->frame.basis, rng, 0.4);
    const FockOperator push = lambda_g(g, fb);
    CHECK(push.mat.isIdentity(1e-13));
    // against an explicit re-framed codomain the matrix is the exterior power
    Eigen::MatrixXcd mix(fb->modes(), fb->modes());
    for (int c = 0; c < fb->modes(); ++c) mix.col(c) = random_complex_vector(rng, fb->modes());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(mix);
    const Eigen::MatrixXcd uq =
        qr.householderQ() * Eigen::MatrixXcd::Identity(fb->modes(), fb->modes());
    const FockBasisPtr cod = make_fock_basis(
        LagrangianFrame(fb->frame.basis, g.mat * fb->frame.columns * uq, 1e-9), -1);
    const FockOperator lam = lambda_g(g, fb, cod);
    CHECK(lam.unitary_defect() < 1e-10);
    // intertwining on a random generator
    const Eigen::VectorXcd v = random_real_vector(fb->frame.basis, rng);
    const Eigen::MatrixXcd lhs = clifford_rep(*cod, g.mat * v) * lam.mat;
    const Eigen::MatrixXcd rhs = lam.mat * clifford_rep(*fb, v);
    CHECK((lhs - rhs).norm() < 1e-10);

    TruncatedOperator notorth(fb->frame.basis,
                              2.0 * Eigen::MatrixXcd::Identity(fb->frame.basis.dim(),
                                                               fb->frame.basis.dim()));
    notorth.verify_flags();
    CHECK_THROWS_AS(lambda_g(notorth, fb), NonOrthogonalError);
}

TEST_CASE("vacuum for the two-mode rotation has the advertised shape") {
    const FockBasisPtr fb = small_basis();
    const LagrangianFrame& frame = fb->frame;
    const FiberFamily synth = synthetic_family(frame);
    const double theta2 = 0.55, phi = 1.2; // alpha = theta2 in the family's angles
    const Quaternion x(std::cos(2 * theta2), 0.0, std::sin(2 * theta2) * std::cos(phi),
                       std::sin(2 * theta2) * std::sin(phi));
    const TruncatedOperator g = synth.op_of(x);
    const VacuumResult vac = vacuum_vector(g, fb);
    // vacuum ~ cos(a) + sin(a) e^{i phi} l1 /\ l2
    const cdouble amp0 = vac.vec.amp(0);
    const cdouble amp12 = vac.vec.amp(0b011);
    CHECK(std::abs(amp0 - cdouble(std::cos(theta2), 0)) < 1e-10);
    CHECK(std::abs(amp12 - std::sin(theta2) * std::exp(cdouble(0, phi))) < 1e-10);
    // annihilation conditions hold
    double worst = 0.0;
    for (int j = 0; j < fb->modes(); ++j) {
        const Eigen::VectorXcd lbar = frame.basis.real_structure(frame.columns.col(j));
        worst = std::max(worst, (clifford_rep(*fb, g.mat * lbar) * vac.vec.amps).norm());
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("implementer diagnostics and the torsor property") {
    const FockBasisPtr fb = small_basis();
    Rng rng(21);
    const TruncatedOperator g = random_real_orthogonal(fb->frame.basis, rng, 0.3);
    const ImplementerResult can = implementer(g, fb);
    CHECK(can.residual < 1e-10);
    CHECK(can.op.unitary_defect() < 1e-10);
    // canonical phase: positive vacuum overlap
    CHECK(can.op.mat(0, 0).real() > 0.0);
    CHECK(std::abs(can.op.mat(0, 0).imag()) < 1e-12);

    const BruteForceResult bf = brute_force_implementer(g, fb);
    CHECK(bf.lambda_min < 1e-10);
    CHECK(bf.lambda_second > 1e-4);
    // same torsor: differ by a unit phase, equal after the shared convention
    const cdouble z = (can.op.mat.adjoint() * bf.op.mat).trace() /
                      static_cast<double>(fb->dim());
    CHECK(std::abs(std::abs(z) - 1.0) < 1e-9);
    CHECK((bf.op.mat - z * can.op.mat).norm() < 1e-8);
    CHECK((bf.op.mat - can.op.mat).norm() < 1e-8);

    // intertwiner T = Lambda U^*: Clifford linear between the Fock spaces
    const FockOperator t = intertwiner(g, fb);
    const Eigen::VectorXcd v = random_real_vector(fb->frame.basis, rng);
    const Eigen::MatrixXcd lhs = clifford_rep(*t.codomain, v) * t.mat;
    const Eigen::MatrixXcd rhs = t.mat * clifford_rep(*fb, v);
    CHECK((lhs - rhs).norm() < 1e-9);
    CHECK(suites::parity_mixing_norm(t.mat, *fb, *t.codomain) < 1e-10);
}

TEST_CASE("implementer fails loudly without a vacuum") {
    const FockBasisPtr fb = small_basis();
    const ModeBasis& b = fb->frame.basis;
    // swap one mode with its conjugate: C_g singular
    Eigen::MatrixXcd swap = Eigen::MatrixXcd::Identity(b.dim(), b.dim());
    const Eigen::VectorXcd l0 = fb->frame.columns.col(0);
    const Eigen::VectorXcd l0b = b.real_structure(l0);
    swap -= l0 * l0.adjoint() + l0b * l0b.adjoint();
    swap += l0b * l0.adjoint() + l0 * l0b.adjoint();
    TruncatedOperator gswap(b, swap);
    gswap.verify_flags();
    REQUIRE(gswap.orthogonal);
    CHECK_THROWS_AS(implementer(gswap, fb), SingularCError);
    // but the brute force oracle still finds the (parity-reversing) implementer
    const BruteForceResult bf = brute_force_implementer(gswap, fb);
    CHECK(bf.lambda_second > 1e-6);
    CHECK(suites::parity_mixing_norm(bf.op.mat, *fb, *fb) < 1e-9);
    bool reverses = false;
    // Omega must map into odd parity
    FockVector img(fb);
    img.amps = bf.op.mat.col(0);
    reverses = (parity(img) == Parity::Odd);
    CHECK(reverses);
}

TEST_CASE("pair vacuum machinery at scale parity") {
    const FockBasisPtr fb = small_basis(2, 2); // d = 5
    Rng rng(31);
    const TruncatedOperator g = random_real_orthogonal(fb->frame.basis, rng, 0.5);
    const VacuumResult dense = vacuum_vector(g, fb);
    const PairVacuumResult pv = pair_vacuum_of(g, fb->frame);
    CHECK(pv.youla_residual < 1e-10);
    const FockVector lifted = pair_vacuum_to_fock(pv.vac, fb);
    CHECK(std::abs(inner(lifted, dense.vec) - cdouble(1, 0)) < 1e-9);
    CHECK(vacuum_condition_residual(pv.vac, g, fb->frame) < 1e-9);

    // overlaps agree with the dense inner product
    const TruncatedOperator h = random_real_orthogonal(fb->frame.basis, rng, 0.5);
    const PairVacuumResult pw = pair_vacuum_of(h, fb->frame);
    const FockVector lifted2 = pair_vacuum_to_fock(pw.vac, fb);
    const cdouble direct = inner(lifted, lifted2);
    const cdouble fast = pair_vacuum_overlap(pv.vac, pw.vac);
    CHECK(std::abs(direct - fast) < 1e-9);
}

TEST_CASE("fock sum iso rejects overlapping blocks") {
    const FockBasisPtr fb = small_basis();
    const Eigen::MatrixXcd f1 = fb->frame.columns.leftCols(2);
    const LagrangianFrame fr1(fb->frame.basis, f1, 1e-9);
    const FockBasisPtr fb1 = make_fock_basis(fr1, -1);
    const TensorBasis tb(fb1, fb1); // same block twice
    CHECK_THROWS_AS(fock_sum_iso(tb, fb), NonOrthogonalBlocksError);
}

TEST_CASE("randomized clifford suite") {
    const auto res = suites::suite_clifford(5150);
    for (const auto& f : res.failures) UNSCOPED_INFO(f);
    CHECK(res.failures.empty());
}
