#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vaclab/scenario.hpp"

using namespace vaclab;
namespace fs = std::filesystem;

static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

static fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("vaclab_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

static const char* kSmallRun =
    "[data]\n"
    "profile = quadratic\n"
    "A = 1.0\n"
    "beta = 0.1\n"
    "delta = -0.05\n"
    "[solver]\n"
    "method = mol\n"
    "kappa = 0.1\n"
    "dt = 1e-4\n"
    "t_final = 0.01\n"
    "[experiment]\n"
    "kind = single-run\n";

TEST_CASE("parser fills defaults and reads every section") {
    Scenario s = parse_scenario(kSmallRun);
    CHECK(s.profile == ProfileKind::quadratic);
    CHECK(s.A == 1.0);
    CHECK(s.beta == 0.1);
    CHECK(s.delta == -0.05);
    CHECK(s.gamma == 2.0);
    CHECK(s.method == SolverMethod::mol);
    CHECK(s.kappa == 0.1);
    CHECK(s.t_final == 0.01);
    CHECK(s.n_modes == 32);
    CHECK(s.experiment == ExperimentKind::single_run);
    CHECK(!s.canonical_text.empty());
}

TEST_CASE("parse errors name the offending field") {
    auto expect_invalid = [](const std::string& text, const std::string& needle) {
        try {
            parse_scenario(text);
            FAIL_CHECK("expected a configuration error mentioning '" << needle << "'");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::config_invalid);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_invalid("[solver]\ndt = 1e-4\n", "t_final");
    expect_invalid("[solver]\nt_final = abc\n", "t_final");
    expect_invalid("[bogus]\nx = 1\n", "bogus");
    expect_invalid("[data]\nprofile = cubic\n[solver]\nt_final = 0.1\n", "cubic");
    expect_invalid("[solver]\nmethod = rk9\nt_final = 0.1\n", "rk9");
    expect_invalid("garbage line\n", "garbage");
    expect_invalid("[solver]\nt_final = 0.1\n[experiment]\nkind = kappa-sweep\n", "kappa_list");
    expect_invalid("[solver]\nt_final = 0.1\n[experiment]\nkind = stability-probe\n",
                   "perturbation_eps");
    expect_invalid("[data]\ngamma = 0.9\n[solver]\nt_final = 0.1\n", "gamma");
    expect_invalid("[data]\ngamma = 3\n[solver]\nmethod = picard\nt_final = 0.1\n", "gamma = 2");
    expect_invalid("[data]\nepsilon = 0.3\n[solver]\nt_final = 0.1\n", "epsilon");
    expect_invalid("[solver]\nt_final = -0.1\n", "positive");
}

TEST_CASE("canonical text is order-independent") {
    Scenario a = parse_scenario("[solver]\nt_final = 0.1\ndt = 1e-3\n");
    Scenario b = parse_scenario("[solver]\ndt = 1e-3\nt_final = 0.1\n");
    CHECK(a.canonical_text == b.canonical_text);
}

TEST_CASE("single run writes the full artifact set") {
    fs::path dir = fresh_dir("single");
    Scenario s = parse_scenario(kSmallRun);
    s.output_dir = dir.string();
    RunReport r = run_scenario(s);
    CHECK(fs::exists(dir / "report.txt"));
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "energy.csv"));
    REQUIRE(r.oracle_error.has_value());
    CHECK(*r.oracle_error < 1e-6);
    CHECK(r.text.find("config_hash=") != std::string::npos);
    CHECK(r.text.find("monitor_satisfied=yes") != std::string::npos);
    std::string traj = slurp(dir / "trajectory.csv");
    CHECK(traj.rfind("# config_hash=", 0) == 0);
    std::string energy = slurp(dir / "energy.csv");
    CHECK(energy.find("total,physical_energy,dissipated") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
    Scenario s = parse_scenario(kSmallRun);
    fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
    s.output_dir = d1.string();
    run_scenario(s);
    s.output_dir = d2.string();
    run_scenario(s);
    CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
    CHECK(slurp(d1 / "energy.csv") == slurp(d2 / "energy.csv"));
    CHECK(slurp(d1 / "report.txt") == slurp(d2 / "report.txt"));
}

TEST_CASE("stability probe with a vanishing perturbation returns zero differences") {
    fs::path dir = fresh_dir("stab0");
    Scenario s = parse_scenario(
        "[data]\nbeta = 0.1\ndelta = -0.05\n"
        "[solver]\nkappa = 0.1\ndt = 1e-4\nt_final = 0.01\n"
        "[experiment]\nkind = stability-probe\nperturbation_eps = 0\n");
    s.output_dir = dir.string();
    RunReport r = run_scenario(s);
    CHECK(r.text.find("sup_delta_v_L2=0") != std::string::npos);
}

TEST_CASE("hardy suite reports small refinement changes") {
    fs::path dir = fresh_dir("hardy");
    Scenario s = parse_scenario("[solver]\nt_final = 0.1\n[experiment]\nkind = hardy-suite\n");
    s.output_dir = dir.string();
    RunReport r = run_scenario(s);
    CHECK(fs::exists(dir / "hardy.csv"));
    size_t pos = r.text.find("hardy_worst_refinement_change=");
    REQUIRE(pos != std::string::npos);
    double worst = std::stod(r.text.substr(pos + 30));
    CHECK(worst < 0.01);
}

#ifdef VACLAB_CLI_PATH
TEST_CASE("executable exit codes") {
    fs::path dir = fresh_dir("exe");
    fs::path good = dir / "good.ini";
    {
        std::ofstream out(good);
        out << kSmallRun;
    }
    fs::path bad = dir / "bad.ini";
    {
        std::ofstream out(bad);
        out << "[solver]\ndt = 1e-4\n";  // missing t_final
    }
    std::string base = std::string(VACLAB_CLI_PATH);
    int rc_good = std::system(
        (base + " run " + good.string() + " --output-dir " + (dir / "out").string() +
         " > /dev/null 2>&1")
            .c_str());
    CHECK(WEXITSTATUS(rc_good) == 0);
    CHECK(fs::exists(dir / "out" / "report.txt"));
    int rc_bad = std::system(
        (base + " run " + bad.string() + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc_bad) == 2);
    int rc_missing = std::system(
        (base + " run " + (dir / "nope.ini").string() + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc_missing) == 2);
}
#endif
