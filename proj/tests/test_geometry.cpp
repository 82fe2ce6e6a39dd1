#include <catch2/catch_amalgamated.hpp>

#include "fockgerbe/geometry.hpp"
#include "fockgerbe/suites.hpp"

using namespace fockgerbe;

TEST_CASE("stereographic projections at special points") {
    CHECK(stereo_north(S4Point::south()).norm() == 0.0);
    CHECK((stereo_north(S4Point(Quaternion::one(), 0.0)) - Quaternion::one()).norm() < 1e-15);
    CHECK_THROWS_AS(stereo_north(S4Point::north()), PoleError);
    CHECK_THROWS_AS(stereo_south(S4Point::south()), PoleError);

    // phi_N o phi_S^{-1} (j) = j^{-1} = -j
    const Quaternion got = stereo_north(stereo_south_inv(Quaternion::j()));
    CHECK((got + Quaternion::j()).norm() < 1e-14);
}

TEST_CASE("round trips of the charts") {
    Rng rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const Quaternion w(g(rng), g(rng), g(rng), g(rng));
        const S4Point p = stereo_north_inv(w);
        CHECK(std::abs(p.z.norm2() + p.y * p.y - 1.0) < 1e-12);
        CHECK((stereo_north(p) - w).norm() < 1e-11 * std::max(1.0, w.norm()));
    }
}

TEST_CASE("theta on poles and equivalence classes") {
    const HP1Point south = theta_s4_to_hp1(S4Point::south());
    CHECK(south.q0.a == Catch::Approx(1.0));
    CHECK(south.q1.norm() < 1e-14);
    const HP1Point north = theta_s4_to_hp1(S4Point::north());
    CHECK(north.q1.a == Catch::Approx(1.0));
    CHECK(north.q0.norm() < 1e-14);

    // normalization is idempotent; classes absorb right scaling
    Rng rng(9);
    const Quaternion a = random_unit_quaternion(rng);
    const Quaternion b = random_unit_quaternion(rng);
    HP1Point p(a, b);
    HP1Point q(p.q0, p.q1);
    CHECK(p.distance(q) < 1e-13);
    const Quaternion w = random_unit_quaternion(rng) * 2.3;
    HP1Point scaled(a * w, b * w);
    CHECK(p.distance(scaled) < 1e-12);
}

TEST_CASE("beta loop endpoints and constant loop at 1") {
    Rng rng(4);
    const Quaternion x = random_unit_quaternion(rng);
    const S4Point p0 = beta_point(x, 0.0);
    CHECK((p0.z - Quaternion::one()).norm() + std::abs(p0.y) < 1e-12);
    const S4Point ppi = beta_point(x, kTwoPi / 2.0);
    CHECK((ppi.z - x).norm() + std::abs(ppi.y) < 1e-12);

    for (int k = 0; k < 8; ++k) {
        const S4Point c = beta_point(Quaternion::one(), kTwoPi * k / 8.0);
        CHECK((c.z - Quaternion::one()).norm() + std::abs(c.y) < 1e-14);
    }
}

TEST_CASE("eta sections") {
    Rng rng(6);
    Quaternion x = random_unit_quaternion(rng);
    x.b = 0.0; // drop into S^2
    x = normalized(x);
    const std::size_t m = 16;
    const SampledLoop eta = eta_section(x, EtaSide::MinusI, m);
    for (std::size_t k = 0; k < m; ++k) {
        double n2 = 0.0;
        for (int r = 0; r < 8; ++r) n2 += std::norm(eta.values(r, static_cast<Eigen::Index>(k)));
        CHECK(std::abs(n2 - 1.0) < 1e-12);
    }
    // projection identity: [eta0 : eta1] = theta_S(R(beta_x(s)))
    for (std::size_t k = 0; k < m; ++k) {
        const Quaternion e0(eta.values(0, static_cast<Eigen::Index>(k)).real(),
                            eta.values(1, static_cast<Eigen::Index>(k)).real(),
                            eta.values(2, static_cast<Eigen::Index>(k)).real(),
                            eta.values(3, static_cast<Eigen::Index>(k)).real());
        const Quaternion e1(eta.values(4, static_cast<Eigen::Index>(k)).real(),
                            eta.values(5, static_cast<Eigen::Index>(k)).real(),
                            eta.values(6, static_cast<Eigen::Index>(k)).real(),
                            eta.values(7, static_cast<Eigen::Index>(k)).real());
        const S4Point rp = rotate_r_s4(beta_point(x, eta.param(k)));
        const HP1Point lhs(e0, e1);
        const HP1Point rhs = theta_s4_to_hp1(rp);
        CHECK(lhs.distance(rhs) < 1e-10);
    }
    CHECK_THROWS_AS(eta_section(Quaternion::i(), EtaSide::PlusI, m), ChartHoleError);
    CHECK_THROWS_AS(eta_section(-Quaternion::i(), EtaSide::MinusI, m), ChartHoleError);
    CHECK_THROWS_AS(transition_loop_r(Quaternion::i(), m), ChartHoleError);
}

TEST_CASE("r(1) is the constant loop at 1") {
    const SampledLoop r = transition_loop_r(Quaternion::one(), 16);
    for (std::size_t k = 0; k < 16; ++k) {
        CHECK(std::abs(r.values(0, static_cast<Eigen::Index>(k)).real() - 1.0) < 1e-14);
        for (int c = 1; c < 4; ++c)
            CHECK(std::abs(r.values(c, static_cast<Eigen::Index>(k))) < 1e-14);
    }
}

TEST_CASE("sample count discipline") {
    CHECK_THROWS_AS(SampledLoop(4, 12), SampleCountError);
    CHECK_THROWS_AS(SampledLoop(4, 4), SampleCountError);
    CHECK_NOTHROW(SampledLoop(4, 8));
}

TEST_CASE("randomized geometry suite") {
    const auto res = suites::suite_geom(2024);
    for (const auto& f : res.failures) UNSCOPED_INFO(f);
    CHECK(res.failures.empty());
}
