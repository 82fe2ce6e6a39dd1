#include <catch2/catch_amalgamated.hpp>

#include "fockgerbe/quaternion.hpp"
#include "fockgerbe/random_support.hpp"

using namespace fockgerbe;

TEST_CASE("defining relations") {
    const Quaternion i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
    CHECK((i * j - k).norm() == 0.0);
    CHECK((j * k - i).norm() == 0.0);
    CHECK((k * i - j).norm() == 0.0);
    CHECK((i * i + Quaternion::one()).norm() == 0.0);
    CHECK((i * j * k + Quaternion::one()).norm() == 0.0);
}

TEST_CASE("unit element and conjugation") {
    Rng rng(11);
    const Quaternion q = random_unit_quaternion(rng);
    CHECK((Quaternion::one() * q - q).norm() < 1e-15);
    const Quaternion p = random_unit_quaternion(rng);
    CHECK(((p * q).conj() - q.conj() * p.conj()).norm() < 1e-14);
    CHECK(std::abs((q * q.conj()).a - q.norm2()) < 1e-14);
}

TEST_CASE("hand-expanded product (2+3i)(2-3i)") {
    const Quaternion p(2, 3, 0, 0), q(2, -3, 0, 0);
    const Quaternion r = p * q;
    CHECK(r.a == Catch::Approx(13.0));
    CHECK(std::abs(r.b) + std::abs(r.c) + std::abs(r.d) < 1e-15);
}

TEST_CASE("norm is multiplicative, associativity") {
    Rng rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const Quaternion p(g(rng), g(rng), g(rng), g(rng));
        const Quaternion q(g(rng), g(rng), g(rng), g(rng));
        const Quaternion r(g(rng), g(rng), g(rng), g(rng));
        CHECK(std::abs((p * q).norm() - p.norm() * q.norm()) < 1e-12);
        CHECK((((p * q) * r) - (p * (q * r))).norm() < 1e-12);
    }
}

TEST_CASE("left multiplication matrix") {
    const Eigen::Matrix4d one = so4_of_quat(Quaternion::one());
    CHECK((one - Eigen::Matrix4d::Identity()).norm() < 1e-15);

    // i sends 1 -> i, i -> -1, j -> k, k -> -j
    const Eigen::Matrix4d mi = so4_of_quat(Quaternion::i());
    Eigen::Matrix4d expect;
    expect << 0, -1, 0, 0,
              1,  0, 0, 0,
              0,  0, 0, -1,
              0,  0, 1, 0;
    CHECK((mi - expect).norm() < 1e-15);

    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const Quaternion u = random_unit_quaternion(rng);
        const Eigen::Matrix4d m = so4_of_quat(u);
        CHECK((m.transpose() * m - Eigen::Matrix4d::Identity()).norm() < 1e-12);
        CHECK(m.determinant() == Catch::Approx(1.0).margin(1e-12));
    }
    CHECK_THROWS_AS(so4_of_quat(Quaternion(2, 0, 0, 0)), NonUnitError);
}
