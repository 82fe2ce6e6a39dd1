#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "fockgerbe/hopf.hpp"
#include "fockgerbe/suites.hpp"

using namespace fockgerbe;

namespace {
ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.cutoff = 2;
    cfg.equator_samples = 64;
    cfg.meridian_steps = 8;
    cfg.loop_samples = 16;
    cfg.out_dir = "/tmp/fockgerbe_test_out";
    return cfg;
}

LagrangianFrame frame_for(const ExperimentConfig& cfg) {
    const ModeBasis basis(4, cfg.cutoff);
    return standard_lagrangian(basis, l_finite_quaternionic());
}
} // namespace

TEST_CASE("fiber transition at the two marked points") {
    const ExperimentConfig cfg = small_config();
    const LagrangianFrame frame = frame_for(cfg);
    const FiberFamily fam = main_family(frame.basis, cfg);

    // x = 1: r is constant 1, so the operator is the identity
    const FiberGerbeData at_one = fiber_transition(Quaternion::one(), fam, frame, cfg);
    CHECK_FALSE(at_one.degenerate);
    CHECK((at_one.g.mat - Eigen::MatrixXcd::Identity(frame.ambient_dim(), frame.ambient_dim()))
              .norm() < 1e-10);
    CHECK(at_one.vacuum.pair_count() == 0);
    CHECK(at_one.hs_commutator < 1e-10);

    // x = -1: the shift-like loop; [J, g] matches the block closed form and
    // C_g is singular at the truncation (the degenerate point of the family)
    const FiberGerbeData at_minus = fiber_transition(-Quaternion::one(), fam, frame, cfg);
    CHECK(at_minus.degenerate);
    CHECK(at_minus.sigma_min_c < 1e-8);
    CHECK(at_minus.hs_commutator > 0.1);
    {
        // block formula on the raw truncation: [J, M]_{p r} = 2i sign(p) sigma_{p-r}
        // for p r < 0, zero for p r > 0
        const SampledLoop r = transition_loop_r(-Quaternion::one(),
                                                static_cast<std::size_t>(cfg.loop_samples));
        const FourierLoop sigma = so4_loop_of_quaternion_loop(r);
        const TruncatedOperator raw = multiplication_operator(frame.basis, sigma);
        const Eigen::MatrixXcd jm = frame.unitary_structure();
        const Eigen::MatrixXcd comm = jm * raw.mat - raw.mat * jm;
        const ModeBasis& mb = frame.basis;
        double worst = 0.0;
        for (int p = -mb.cutoff; p <= mb.cutoff; ++p)
            for (int q = -mb.cutoff; q <= mb.cutoff; ++q) {
                if (p == 0 || q == 0) continue;
                Eigen::MatrixXcd blk(4, 4);
                for (int rr = 0; rr < 4; ++rr)
                    for (int cc = 0; cc < 4; ++cc)
                        blk(rr, cc) = comm(mb.flat(p, rr), mb.flat(q, cc));
                Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
                if (p * q < 0) expect = cdouble(0, 2.0 * (p > 0 ? 1 : -1)) * sigma.at(p - q);
                worst = std::max(worst, (blk - expect).norm());
            }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("accepted points satisfy the residual gate") {
    const ExperimentConfig cfg = small_config();
    const LagrangianFrame frame = frame_for(cfg);
    const FiberFamily fam = main_family(frame.basis, cfg);
    Rng rng(40);
    for (int t = 0; t < 10; ++t) {
        Quaternion x = random_unit_quaternion(rng);
        x.b = 0.0;
        x = normalized(x);
        const FiberGerbeData d = fiber_transition(x, fam, frame, cfg);
        if (d.degenerate) continue;
        CHECK(d.vacuum_residual <= cfg.residual_tol);
        CHECK(d.g.orthogonal_defect() < 1e-10);
        CHECK(d.g.real_defect() < 1e-10);
    }
}

TEST_CASE("small brute-force cross check of a fiber operator") {
    // at the smallest cutoff the implementer of g(x) can be checked densely
    ExperimentConfig cfg = small_config();
    cfg.cutoff = 0; // only the constant modes: d = 2, full algebra dim 4
    const LagrangianFrame frame = frame_for(cfg);
    const FiberFamily fam = main_family(frame.basis, cfg);
    const Quaternion x = normalized(Quaternion(0.6, 0.0, 0.8, 0.0));
    const FiberGerbeData d = fiber_transition(x, fam, frame, cfg);
    if (!d.degenerate) {
        const FockBasisPtr fb = make_fock_basis(frame, -1);
        const ImplementerResult can = implementer(d.g, fb);
        const BruteForceResult bf = brute_force_implementer(d.g, fb);
        CHECK(can.residual < 1e-9);
        CHECK((can.op.mat - bf.op.mat).norm() < 1e-8);
        // the vacuum line of the implementer is the pair vacuum
        const FockVector lifted = pair_vacuum_to_fock(d.vacuum, fb);
        FockVector col0(fb);
        col0.amps = can.op.mat.col(0);
        CHECK(std::abs(std::abs(inner(lifted, col0)) - 1.0) < 1e-9);
    }
}

TEST_CASE("null and synthetic gates at small scale") {
    ExperimentConfig cfg = small_config();
    const LagrangianFrame frame = frame_for(cfg);
    const ChernResult null_run = chern_of_q(null_family(frame.basis), frame, cfg);
    CHECK(null_run.degree == 0);

    const ChernResult synth = chern_of_q(synthetic_family(frame), frame, cfg);
    CHECK(std::abs(synth.degree) == 1);
    CHECK(synth.max_phase_step < 0.5 * kTwoPi / 2.0);

    // same cap on both sides: degree must vanish identically
    ExperimentConfig consistency = cfg;
    consistency.same_cap_consistency = true;
    const ChernResult same = chern_of_q(synthetic_family(frame), frame, consistency);
    CHECK(same.degree == 0);
}

TEST_CASE("report files and determinism") {
    ExperimentConfig cfg = small_config();
    cfg.equator_samples = 32;
    const LagrangianFrame frame = frame_for(cfg);
    const ChernResult a = chern_of_q(synthetic_family(frame), frame, cfg);
    const ChernResult b = chern_of_q(synthetic_family(frame), frame, cfg);
    RunManifest manifest;
    manifest.subcommand = "test";
    manifest.seed = 7;
    const std::string dir_a = cfg.out_dir + "/runA";
    const std::string dir_b = cfg.out_dir + "/runB";
    emit_report(a, manifest, dir_a);
    emit_report(b, manifest, dir_b);
    for (const char* f : {"/points.csv", "/summary.json", "/phase_vs_angle.txt"}) {
        std::ifstream fa(dir_a + f), fb(dir_b + f);
        REQUIRE(fa.good());
        REQUIRE(fb.good());
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        CHECK(sa.str() == sb.str());
        CHECK(!sa.str().empty());
    }
    // summary schema round-trips
    std::ifstream in(dir_a + "/summary.json");
    nlohmann::json j;
    in >> j;
    CHECK(j.at("degree").get<int>() == a.degree);
    CHECK(j.contains("degenerate_points"));
    CHECK(j.at("seed").get<unsigned long long>() == 7);
    // unwrapped phase column has no jumps above pi
    std::ifstream ph(dir_a + "/phase_vs_angle.txt");
    std::string line;
    std::getline(ph, line); // header
    double prev = 0.0;
    bool first = true;
    while (std::getline(ph, line)) {
        std::istringstream ls(line);
        double phi, arg;
        ls >> phi >> arg;
        if (!first) CHECK(std::abs(arg - prev) < 0.5 * kTwoPi);
        prev = arg;
        first = false;
    }
}

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_config();
    cfg.n = 2;
    CHECK_THROWS(cfg.validate());
    cfg = small_config();
    cfg.loop_samples = 12;
    CHECK_THROWS_AS(cfg.validate(), SampleCountError);
    const nlohmann::json j = {{"cutoff", 3}, {"equator_samples", 32}, {"loop_samples", 16}};
    const ExperimentConfig parsed = config_from_json(j);
    CHECK(parsed.cutoff == 3);
    CHECK(parsed.equator_samples == 32);
}
