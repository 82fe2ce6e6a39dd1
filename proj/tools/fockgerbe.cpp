#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fockgerbe/hopf.hpp"
#include "fockgerbe/suites.hpp"

using nlohmann::json;
namespace fg = fockgerbe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fg::Error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

int run_check(const std::string& suite, unsigned long long seed) {
    fg::suites::SuiteResult res;
    try {
        res = fg::suites::run_suite(suite, seed);
    } catch (const fg::Error& e) {
        std::cerr << json{{"error", e.what()}} << "\n";
        return kExitConfig;
    }
    json out = {{"suite", suite},
                {"seed", seed},
                {"checks", res.checks},
                {"failures", res.failures}};
    std::cout << out.dump(2) << "\n";
    return res.ok() ? kExitOk : kExitAssertion;
}

fg::FourierLoop loop_from_json(const json& j, int n) {
    fg::FourierLoop loop;
    for (const auto& entry : j) {
        const int f = entry.at("freq").get<int>();
        const auto& rows = entry.at("matrix");
        Eigen::MatrixXcd m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                const auto& cell = rows.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
                m(r, c) = fg::cdouble(cell.at(0).get<double>(), cell.at(1).get<double>());
            }
        loop.coef[f] = m;
    }
    return loop;
}

int run_implementer(const std::string& loop_path, int cutoff, int degree, bool strict,
                    const std::string& out_path) {
    const json lj = load_json(loop_path);
    const int n = lj.at("n").get<int>();
    const fg::FourierLoop loop = loop_from_json(lj.at("coefficients"), n);
    if (loop.real_defect() > 1e-9) throw fg::Error("loop coefficients are not a real loop");

    const fg::ModeBasis basis(n, cutoff);
    const Eigen::MatrixXcd lfin =
        (n == 2) ? fg::l_finite_rotation_plane()
                 : (n == 4 ? fg::l_finite_quaternionic()
                           : throw fg::Error("implementer supports n = 2 or 4"));
    const fg::LagrangianFrame frame = fg::standard_lagrangian(basis, lfin);
    fg::MultiplicationOptions mo;
    mo.orthogonalize = true;
    mo.strict = strict;
    const fg::TruncatedOperator g = fg::multiplication_operator(basis, loop, mo);
    const int cap = degree > 0 ? degree : -1;
    const fg::FockBasisPtr fb = fg::make_fock_basis(frame, cap);
    if (fb->dim() > 5000) throw fg::Error("Fock dimension too large; lower --degree or --cutoff");
    std::string method = "canonical";
    double residual = 0.0, unitary_defect = 0.0, sigma_min = 0.0;
    Eigen::MatrixXcd u;
    try {
        const fg::ImplementerResult impl = fg::implementer(g, fb);
        u = impl.op.mat;
        residual = impl.residual;
        unitary_defect = impl.unitary_defect;
        sigma_min = impl.sigma_min_c;
    } catch (const fg::SingularCError& e) {
        // no vacuum chart around this operator; the dense oracle still works
        // at small dimensions
        if (fb->dim() > 256) throw;
        method = "brute_force";
        sigma_min = e.smallest_singular_value;
        const fg::BruteForceResult bf = fg::brute_force_implementer(g, fb);
        u = bf.op.mat;
        unitary_defect = bf.op.unitary_defect();
        residual = fg::detail::intertwining_residual(*fb, u, g.mat);
    }
    const fg::cdouble vac_phase = u(0, 0);
    json out = {{"cutoff", cutoff},
                {"fock_dim", fb->dim()},
                {"method", method},
                {"leakage", g.leakage},
                {"sigma_min_c", sigma_min},
                {"residual", residual},
                {"unitary_defect", unitary_defect},
                {"vacuum_overlap", {vac_phase.real(), vac_phase.imag()}}};
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        f << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int run_dd(const std::string& config_path, const std::string& out_path) {
    const json cj = load_json(config_path);
    auto cover = std::make_shared<fg::IndexedCover>(fg::cover_from_json(cj.at("cover")));
    fg::SectionFamily sections;
    for (const auto& s : cj.at("sections"))
        sections.set(s.at("i").get<int>(), s.at("j").get<int>(), fg::u1fn_from_json(s));
    const fg::CechCochain g = fg::dd_cocycle(cover, sections);
    const double defect = fg::cocycle_defect(g);
    json out = {{"cocycle", fg::cochain_to_json(g)},
                {"cocycle_defect", defect},
                {"trivial", g.is_trivial()}};
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        f << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << "\n";
    return defect < 1e-8 ? kExitOk : kExitNumerical;
}

int run_suspend(const std::string& config_path, bool inverse, const std::string& out_path) {
    const json cj = load_json(config_path);
    fg::IndexedCover base = fg::cover_from_json(cj.at("base_cover"));
    const fg::SuspensionCover sc = fg::build_suspension_cover(base);
    json out;
    if (!inverse) {
        fg::CechCochain h(sc.base_restriction, 1);
        for (const auto& e : cj.at("entries"))
            h.set(e.at("tuple").get<fg::Tuple>(), fg::u1fn_from_json(e));
        const fg::CechCochain g = fg::suspension_forward(h, sc);
        const fg::CechCochain back = fg::suspension_partial_inverse(g, sc);
        out = {{"cochain", fg::cochain_to_json(g)}, {"roundtrip_defect", back.dist(h)}};
    } else {
        fg::CechCochain g(sc.sigma, 2);
        for (const auto& e : cj.at("entries"))
            g.set(e.at("tuple").get<fg::Tuple>(), fg::u1fn_from_json(e));
        const fg::CechCochain h = fg::suspension_partial_inverse(g, sc);
        const fg::CechCochain fwd = fg::suspension_forward(h, sc);
        out = {{"cochain", fg::cochain_to_json(h)}, {"roundtrip_defect", fwd.dist(g)}};
    }
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        f << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int run_hopf(const std::string& config_path, const std::string& family_name,
             const std::string& out_dir_override, int samples_override) {
    fg::ExperimentConfig base_cfg;
    json cfg_json;
    if (!config_path.empty()) {
        cfg_json = load_json(config_path);
        base_cfg = fg::config_from_json(cfg_json);
    }
    if (!out_dir_override.empty()) base_cfg.out_dir = out_dir_override;
    if (samples_override > 0) base_cfg.equator_samples = samples_override;

    std::vector<int> cutoffs{base_cfg.cutoff};
    std::vector<int> sample_counts{base_cfg.equator_samples};
    if (family_name == "hopf") {
        if (cfg_json.count("cutoffs")) cutoffs = cfg_json.at("cutoffs").get<std::vector<int>>();
        if (cfg_json.count("equator_sample_grid"))
            sample_counts = cfg_json.at("equator_sample_grid").get<std::vector<int>>();
    }

    json table = json::array();
    std::vector<int> degrees;
    for (int q : cutoffs)
        for (int m : sample_counts) {
            fg::ExperimentConfig cfg = base_cfg;
            cfg.cutoff = q;
            cfg.equator_samples = m;
            cfg.validate();
            const fg::ModeBasis basis(4, q);
            const fg::LagrangianFrame frame =
                fg::standard_lagrangian(basis, fg::l_finite_quaternionic());
            fg::FiberFamily fam;
            if (family_name == "hopf")
                fam = fg::main_family(basis, cfg);
            else if (family_name == "null")
                fam = fg::null_family(basis);
            else if (family_name == "synthetic")
                fam = fg::synthetic_family(frame);
            else
                throw fg::Error("unknown family " + family_name);

            const fg::ChernResult res = fg::chern_of_q(fam, frame, cfg);
            degrees.push_back(res.degree);
            table.push_back({{"cutoff", q},
                             {"equator_samples", m},
                             {"degree", res.degree},
                             {"retries", res.retries_used},
                             {"max_vacuum_residual", res.max_vacuum_residual},
                             {"min_sigma_c", res.min_sigma_c},
                             {"degenerate_count", res.degenerate_points.size()}});
            fg::RunManifest manifest;
            manifest.subcommand = "hopf:" + family_name;
            manifest.seed = cfg.seed;
            manifest.config = {{"cutoff", q}, {"equator_samples", m}};
            char sub[128];
            std::snprintf(sub, sizeof(sub), "%s/%s_q%d_m%d", cfg.out_dir.c_str(),
                          family_name.c_str(), q, m);
            fg::emit_report(res, manifest, sub);
        }

    const bool stable =
        std::all_of(degrees.begin(), degrees.end(), [&](int d) { return d == degrees.front(); });
    json summary = {{"family", family_name}, {"table", table}, {"stable", stable},
                    {"degree", degrees.front()},
                    {"abs_degree", std::abs(degrees.front())}};
    std::filesystem::create_directories(base_cfg.out_dir);
    std::ofstream f(base_cfg.out_dir + "/" + family_name + "_convergence.json");
    f << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << "\n";
    return stable ? kExitOk : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-mode Fock/gerbe laboratory"};
    app.require_subcommand(1);

    std::string suite = "all";
    unsigned long long seed = 7;
    auto* check = app.add_subcommand("check", "run randomized invariant suites");
    check->add_option("suite", suite, "clifford | modes | torsor | cech | geom | all");
    check->add_option("--seed", seed, "RNG seed recorded in the output");

    std::string loop_path, out_path;
    int cutoff = 2, degree = -1;
    auto* impl = app.add_subcommand("implementer", "implementer of a loop's Bogoliubov action");
    impl->add_option("--loop", loop_path, "JSON Fourier coefficients of an SO(n) loop")
        ->required();
    impl->add_option("--cutoff", cutoff, "frequency cutoff Q");
    impl->add_option("--degree", degree, "Fock degree cap (default: full)");
    impl->add_option("--out", out_path, "write the JSON summary here too");
    bool strict = false;
    impl->add_flag("--strict", strict, "error out when the truncation leaks Fourier mass");

    std::string dd_config, dd_out;
    auto* dd = app.add_subcommand("dd", "Dixmier-Douady cocycle from sections");
    dd->add_option("--config", dd_config, "JSON with cover and sections")->required();
    dd->add_option("--out", dd_out, "output path");

    std::string sus_config, sus_out;
    bool sus_inverse = false;
    auto* sus = app.add_subcommand("suspend", "suspension cochain chase");
    sus->add_option("--config", sus_config, "JSON with base_cover and entries")->required();
    sus->add_flag("--inverse", sus_inverse, "run the backward chase");
    sus->add_option("--out", sus_out, "output path");

    std::string hopf_config, hopf_out, family = "hopf";
    bool null_test = false, synthetic = false;
    int hopf_samples = 0;
    auto* hopf = app.add_subcommand("hopf", "the quaternionic bundle experiment");
    hopf->add_option("--config", hopf_config, "experiment config JSON");
    hopf->add_flag("--null-test", null_test, "constant family, expects degree 0");
    hopf->add_flag("--synthetic", synthetic, "closed-form winding family, expects |degree| 1");
    hopf->add_option("--samples", hopf_samples, "equator sample count override");
    hopf->add_option("--out", hopf_out, "output directory override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (check->parsed()) return run_check(suite, seed);
        if (impl->parsed()) return run_implementer(loop_path, cutoff, degree, strict, out_path);
        if (dd->parsed()) return run_dd(dd_config, dd_out);
        if (sus->parsed()) return run_suspend(sus_config, sus_inverse, sus_out);
        if (hopf->parsed()) {
            if (null_test) family = "null";
            if (synthetic) family = "synthetic";
            return run_hopf(hopf_config, family, hopf_out, hopf_samples);
        }
    } catch (const fg::RefineError& e) {
        std::cerr << json{{"error", e.what()}} << "\n";
        return kExitNumerical;
    } catch (const fg::NonConvergedError& e) {
        std::cerr << json{{"error", e.what()}} << "\n";
        return kExitNumerical;
    } catch (const fg::SingularCError& e) {
        std::cerr << json{{"error", e.what()}} << "\n";
        return kExitNumerical;
    } catch (const fg::Error& e) {
        std::cerr << json{{"error", e.what()}} << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << json{{"error", e.what()}} << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
