#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fockgerbe/cech.hpp"
#include "fockgerbe/suites.hpp"

using nlohmann::json;

namespace {

int run_cli(const std::string& args, std::string* out = nullptr) {
    const std::string cmd = std::string(FOCKGERBE_CLI_PATH) + " " + args +
                            " > /tmp/fockgerbe_cli_out.json 2>/tmp/fockgerbe_cli_err.json";
    const int status = std::system(cmd.c_str());
    if (out) {
        std::ifstream f("/tmp/fockgerbe_cli_out.json");
        std::stringstream ss;
        ss << f.rdbuf();
        *out = ss.str();
    }
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("check subcommand exit codes") {
    std::string out;
    CHECK(run_cli("check geom --seed 11", &out) == 0);
    const json j = json::parse(out);
    CHECK(j.at("failures").empty());
    CHECK(j.at("seed") == 11);
    CHECK(run_cli("check nosuchsuite") == 2);
    CHECK(run_cli("") == 2);
}

TEST_CASE("implementer subcommand") {
    // constant rotation commuting with J: identity-phase Lambda implementer
    json loop = {{"n", 2},
                 {"coefficients",
                  json::array({{{"freq", 0},
                                {"matrix",
                                 json::array({json::array({{0.0, 0.0}, {-1.0, 0.0}}),
                                              json::array({{1.0, 0.0}, {0.0, 0.0}})})}}})}};
    {
        std::ofstream f("/tmp/fockgerbe_loop.json");
        f << loop.dump() << "\n";
    }
    std::string out;
    CHECK(run_cli("implementer --loop /tmp/fockgerbe_loop.json --cutoff 1", &out) == 0);
    const json j = json::parse(out);
    CHECK(j.at("residual").get<double>() < 1e-9);
    CHECK(std::abs(j.at("vacuum_overlap").at(0).get<double>() - 1.0) < 1e-9);
    CHECK(std::abs(j.at("vacuum_overlap").at(1).get<double>()) < 1e-9);
    CHECK(run_cli("implementer --loop /nonexistent.json") == 2);

    // band-1 rotation loop: mixes frequencies, small residual on the full algebra
    json rot = {{"n", 2},
                {"coefficients",
                 json::array(
                     {{{"freq", 1},
                       {"matrix", json::array({json::array({{0.5, 0.0}, {0.0, 0.5}}),
                                               json::array({{0.0, -0.5}, {0.5, 0.0}})})}},
                      {{"freq", -1},
                       {"matrix", json::array({json::array({{0.5, 0.0}, {0.0, -0.5}}),
                                               json::array({{0.0, 0.5}, {0.5, 0.0}})})}}})}};
    {
        std::ofstream f("/tmp/fockgerbe_rot.json");
        f << rot.dump() << "\n";
    }
    CHECK(run_cli("implementer --loop /tmp/fockgerbe_rot.json --cutoff 2", &out) == 0);
    const json jr = json::parse(out);
    CHECK(jr.at("residual").get<double>() < 1e-8);
    CHECK(jr.at("leakage").get<double>() > 0.0);
    // strict mode rejects the leaking truncation
    CHECK(run_cli("implementer --loop /tmp/fockgerbe_rot.json --cutoff 2 --strict") == 2);
}

TEST_CASE("dd subcommand") {
    using namespace fockgerbe;
    Rng rng(3);
    const CoverPtr cover = suites::triple_cover(8);
    json sections = json::array();
    std::map<int, U1Fn> eta;
    for (int i : cover->indices) eta[i] = suites::random_u1(rng, GridDesc::circle(8));
    for (int i : cover->indices)
        for (int j2 : cover->indices)
            if (i < j2) {
                json s = u1fn_to_json(eta[i] * eta[j2].inverse());
                s["i"] = i;
                s["j"] = j2;
                sections.push_back(s);
            }
    const json cfg = {{"cover", cover_to_json(*cover)}, {"sections", sections}};
    {
        std::ofstream f("/tmp/fockgerbe_dd.json");
        f << cfg.dump() << "\n";
    }
    std::string out;
    CHECK(run_cli("dd --config /tmp/fockgerbe_dd.json", &out) == 0);
    const json j = json::parse(out);
    CHECK(j.at("trivial").get<bool>());
    CHECK(j.at("cocycle_defect").get<double>() < 1e-10);
}

TEST_CASE("suspend subcommand round trip") {
    using namespace fockgerbe;
    IndexedCover base;
    base.indices = {2, 3, 4, 5};
    const GridDesc g = GridDesc::circle(16);
    for (int i : base.indices) base.nerve[{i}] = g;
    base.nerve[{2, 3}] = g;
    base.nerve[{3, 4}] = g;
    base.nerve[{4, 5}] = g;
    base.nerve[{2, 5}] = g;
    Eigen::VectorXcd wind(16);
    for (int k = 0; k < 16; ++k) wind(k) = std::exp(cdouble(0, kTwoPi * k / 16.0));
    json entries = json::array();
    json e = u1fn_to_json(U1Fn::circle(wind));
    e["tuple"] = Tuple{2, 3};
    entries.push_back(e);
    const json cfg = {{"base_cover", cover_to_json(base)}, {"entries", entries}};
    {
        std::ofstream f("/tmp/fockgerbe_sus.json");
        f << cfg.dump() << "\n";
    }
    std::string out;
    CHECK(run_cli("suspend --config /tmp/fockgerbe_sus.json", &out) == 0);
    const json j = json::parse(out);
    CHECK(j.at("roundtrip_defect").get<double>() < 1e-12);
    CHECK(j.at("cochain").at("degree") == 2);
}

TEST_CASE("hopf subcommand null test") {
    const json cfg = {{"cutoff", 2}, {"equator_samples", 32}, {"meridian_steps", 6},
                      {"loop_samples", 16}, {"out_dir", "/tmp/fockgerbe_cli_hopf"}};
    {
        std::ofstream f("/tmp/fockgerbe_hopf.json");
        f << cfg.dump() << "\n";
    }
    std::string out;
    CHECK(run_cli("hopf --null-test --config /tmp/fockgerbe_hopf.json", &out) == 0);
    const json j = json::parse(out);
    CHECK(j.at("degree") == 0);
    CHECK(j.at("stable").get<bool>());
    std::ifstream summary("/tmp/fockgerbe_cli_hopf/null_q2_m32/summary.json");
    CHECK(summary.good());
}
