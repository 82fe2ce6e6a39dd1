// Acceptance gate: one line per criterion, every tolerance pinned here.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>

#include "fockgerbe/hopf.hpp"
#include "fockgerbe/suites.hpp"

using namespace fockgerbe;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int idx, const char* name, bool pass, const std::string& detail, double secs,
            double budget) {
    const bool in_budget = secs < budget;
    if (!pass || !in_budget) ++failures;
    std::printf("%s criterion %d: %s (%s; %.1f s of %.0f s budget)\n",
                (pass && in_budget) ? "PASS" : "FAIL", idx, name, detail.c_str(), secs, budget);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

} // namespace

int main() {
    const std::uint64_t seed = 20260810;

    { // 1. Clifford anticommutator relation
        Timer t;
        const double err = suites::clifford_anticommutator_max_error(seed, 250);
        report(1, "Clifford anticommutator, 1e3 pairs, n in {2,4}, Q in {0,1}, D=4",
               err <= 1e-9, "max error " + fmt(err), t.seconds(), 30.0);
    }

    { // 2. Fock isometries
        Timer t;
        const suites::FockIsometryErrors e = suites::fock_isometry_errors(seed + 1, 100);
        const bool pass = e.grammian <= 1e-9 && e.tau_isometry <= 1e-9 &&
                          e.tau_defining <= 1e-9 && e.quad_exp_bound <= 1e-9;
        report(2, "Grammian orthonormality, tau isometry, quad-exp bound, 1e2 zetas", pass,
               "grammian " + fmt(e.grammian) + ", tau " + fmt(e.tau_isometry) + ", defining " +
                   fmt(e.tau_defining) + ", bound excess " + fmt(e.quad_exp_bound),
               t.seconds(), 30.0);
    }

    { // 3. Implementer correctness against the brute-force oracle
        Timer t;
        const suites::ImplementerAgreement a = suites::implementer_agreement(seed + 2, 50);
        const bool pass = a.torsor_one_dimensional && a.max_pairwise <= 1e-8 &&
                          a.max_residual <= 1e-8;
        report(3, "canonical vs brute-force implementers, 50 random g", pass,
               "agreement " + fmt(a.max_pairwise) + ", residual " + fmt(a.max_residual) +
                   (a.torsor_one_dimensional ? ", torsor 1-dim" : ", torsor NOT 1-dim"),
               t.seconds(), 300.0);
    }

    { // 4. Algebraic laws
        Timer t;
        const suites::AlgebraicLawErrors e = suites::algebraic_law_errors(seed + 3, 12);
        const bool pass = e.lambda_composition <= 1e-9 && e.phase_homomorphism <= 1e-9 &&
                          e.ca_identities <= 1e-9 && e.zg_roundtrip <= 1e-9;
        report(4, "Lambda composition, phase homomorphism, C/A identities, zg round trip",
               pass,
               "lambda " + fmt(e.lambda_composition) + ", phase " + fmt(e.phase_homomorphism) +
                   ", C/A " + fmt(e.ca_identities) + ", roundtrip " + fmt(e.zg_roundtrip),
               t.seconds(), 120.0);
    }

    { // 5. Cech / Dixmier-Douady machinery
        Timer t;
        const suites::SuiteResult r = suites::suite_cech(seed + 4);
        std::string detail = std::to_string(r.checks) + " checks";
        for (const auto& f : r.failures) detail += "; " + f;
        report(5, "delta delta = 1, canonical-trivial DD, rescaling, suspension round trip",
               r.ok(), detail, t.seconds(), 60.0);
    }

    { // 6. Fock-sum stability and parity dichotomy
        Timer t;
        const suites::StabilityErrors e = suites::stability_errors(seed + 5);
        const bool pass = e.iso_unitary <= 1e-9 && e.inner_product_identity <= 1e-9 &&
                          e.clifford_linearity <= 1e-9 && e.tensor_intertwiner <= 1e-8 &&
                          e.parity_mixing <= 1e-10;
        report(6, "Fock sum iso unitarity/linearity, parity dichotomy", pass,
               "unitary " + fmt(e.iso_unitary) + ", inner " + fmt(e.inner_product_identity) +
                   ", linear " + fmt(e.clifford_linearity) + ", tensor " +
                   fmt(e.tensor_intertwiner) + ", mixing " + fmt(e.parity_mixing),
               t.seconds(), 60.0);
    }

    { // 7. Geometry identities
        Timer t;
        const double beta = suites::geom_beta_max_error(seed + 6);
        const double charts = suites::geom_chart_transition_max_error(seed + 7);
        const double eta = suites::geom_eta_transition_max_error(seed + 8);
        const double rform = suites::geom_r_minus_one_max_error();
        const bool pass = beta <= 1e-10 && charts <= 1e-10 && eta <= 1e-10 && rform <= 1e-10;
        report(7, "beta endpoints, eta transition, chart inversion, r(-1) closed form", pass,
               "beta " + fmt(beta) + ", charts " + fmt(charts) + ", eta " + fmt(eta) +
                   ", r(-1) " + fmt(rform),
               t.seconds(), 10.0);
    }

    { // 8. The experiment gate
        Timer t;
        bool pass = true;
        std::string detail;
        try {
            ExperimentConfig cfg;
            cfg.meridian_steps = 12;
            cfg.loop_samples = 16;
            cfg.out_dir = "acceptance_out";
            cfg.residual_tol = 1e-8;

            // null test at a light configuration
            {
                ExperimentConfig c = cfg;
                c.cutoff = 2;
                c.equator_samples = 64;
                const ModeBasis basis(4, c.cutoff);
                const LagrangianFrame frame =
                    standard_lagrangian(basis, l_finite_quaternionic());
                const ChernResult res = chern_of_q(null_family(basis), frame, c);
                pass = pass && res.degree == 0;
                detail += "null " + std::to_string(res.degree);
            }
            // synthetic winding family
            {
                ExperimentConfig c = cfg;
                c.cutoff = 2;
                c.equator_samples = 64;
                const ModeBasis basis(4, c.cutoff);
                const LagrangianFrame frame =
                    standard_lagrangian(basis, l_finite_quaternionic());
                const ChernResult res = chern_of_q(synthetic_family(frame), frame, c);
                pass = pass && std::abs(res.degree) == 1;
                detail += ", synthetic " + std::to_string(res.degree);
            }
            // main run across the (Q, samples) grid; the degree is reported
            // output and must be integer-stable
            std::vector<int> degrees;
            double max_resid = 0.0;
            std::size_t degenerate_total = 0;
            for (int q : {4, 8})
                for (int m : {256, 512}) {
                    ExperimentConfig c = cfg;
                    c.cutoff = q;
                    c.equator_samples = m;
                    const ModeBasis basis(4, q);
                    const LagrangianFrame frame =
                        standard_lagrangian(basis, l_finite_quaternionic());
                    const ChernResult res = chern_of_q(main_family(basis, c), frame, c);
                    degrees.push_back(res.degree);
                    max_resid = std::max(max_resid, res.max_vacuum_residual);
                    degenerate_total += res.degenerate_points.size();
                    RunManifest manifest;
                    manifest.subcommand = "acceptance";
                    manifest.seed = seed;
                    manifest.config = {{"cutoff", q}, {"equator_samples", m}};
                    emit_report(res, manifest,
                                cfg.out_dir + "/main_q" + std::to_string(q) + "_m" +
                                    std::to_string(m));
                }
            const bool stable = std::all_of(degrees.begin(), degrees.end(),
                                            [&](int d) { return d == degrees.front(); });
            pass = pass && stable && max_resid <= 1e-8;
            pass = pass && std::filesystem::exists(cfg.out_dir + "/main_q4_m256/summary.json");
            detail += ", main degree " + std::to_string(degrees.front()) +
                      (stable ? " (stable)" : " (UNSTABLE)") + ", residual " + fmt(max_resid) +
                      ", degenerate points " + std::to_string(degenerate_total) +
                      ", reports in " + cfg.out_dir;
        } catch (const Error& e) {
            pass = false;
            detail += std::string("; exception: ") + e.what();
        }
        report(8, "experiment gate: null 0, synthetic +-1, main run integer-stable", pass,
               detail, t.seconds(), 1800.0);
    }

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                failures);
    return failures == 0 ? 0 : 1;
}
