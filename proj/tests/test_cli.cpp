// Exercises the installed command surface end to end: subcommands, exit
// codes, and report determinism. The binary path arrives in FQHE_CLI.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli_path() {
    const char* env = std::getenv("FQHE_CLI");
    REQUIRE(env != nullptr);
    return env;
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string out_file = "cli_test_output.tmp";
    const std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream is(out_file);
    std::stringstream ss;
    ss << is.rdbuf();
    result.output = ss.str();
    std::remove(out_file.c_str());
    return result;
}

// report text with the volatile "# " lines removed
std::string stable_part(const std::string& report) {
    std::istringstream is(report);
    std::string line, out;
    while (std::getline(is, line))
        if (line.rfind("# ", 0) != 0) out += line + "\n";
    return out;
}

} // namespace

TEST_CASE("theta subcommand certifies its result") {
    const RunResult r = run("theta --a 0 --b 0 --z 0.1+0.2i --tau 0.3+0.8i");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("verdict truncation_certificate PASS") != std::string::npos);
    CHECK(r.output.find("verdict quasi_periodicity PASS") != std::string::npos);
}

TEST_CASE("gram subcommand reproduces the closed form") {
    const RunResult r = run("gram --k 3 --tau 0+1i --xi-a 0.2 --xi-b 0.1 --grid 64");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("matrix gram 3 3") != std::string::npos);
    CHECK(r.output.find("verdict orthonormal_scalar_matrix PASS") != std::string::npos);
}

TEST_CASE("wen-validate: valid and invalid data") {
    const RunResult good = run("wen-validate --K \"2 1; 1 2\" --n \"1 1\"");
    CHECK(good.exit_code == 0);
    CHECK(good.output.find("datum d 3") != std::string::npos);
    CHECK(good.output.find("datum cyclic true") != std::string::npos);

    const RunResult bad = run("wen-validate --K \"2 0; 0 3\" --n \"1 1\"");
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find("all even or all odd") != std::string::npos);
}

TEST_CASE("usage errors exit with 64") {
    CHECK(run("bogus-subcommand").exit_code == 64);
    CHECK(run("gram").exit_code == 64);       // missing required --k
    CHECK(run("").exit_code == 64);           // missing subcommand
    CHECK(run("--help").exit_code == 0);
}

TEST_CASE("stochastic backends demand a seed") {
    const RunResult r = run("norm --model slater --n 2 --backend qmc --samples 4096");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("seed") != std::string::npos);
}

TEST_CASE("norm subcommand: slater closed form") {
    const RunResult r = run("norm --model slater --n 2 --backend grid --grid 16");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("closed_form_norm 0.5") != std::string::npos);
    CHECK(r.output.find("verdict matches_closed_form PASS") != std::string::npos);
}

TEST_CASE("kvw subcommand evaluates at a seeded point") {
    const RunResult r = run("kvw --K \"2 1; 1 2\" --n \"1 1\" --c 1 --seed 5");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("value ") != std::string::npos);
}

TEST_CASE("center-gram reports both candidate prefactors") {
    const RunResult r = run("center-gram --K \"2\" --tau 0+1i --grid 32");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("kappa_gaussian_integral 0.5") != std::string::npos);
    CHECK(r.output.find("verdict matches_gaussian_integral_prefactor PASS") !=
          std::string::npos);
}

TEST_CASE("curvature subcommand on the closed one-layer field") {
    const RunResult r = run("curvature --model one-layer --m 2 --n-particles 2 --grid 32");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("nearest_integer_degree -1") != std::string::npos);
    CHECK(r.output.find("verdict degree_is_integer PASS") != std::string::npos);
    CHECK(r.output.find("verdict projectively_flat PASS") != std::string::npos);
}

TEST_CASE("identical invocations give identical reports modulo timestamps") {
    const std::string args = "gram --k 2 --tau 0.3+0.8i --xi-a 0.4 --xi-b 0.2 --grid 32";
    const RunResult a = run(args);
    const RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(stable_part(a.output) == stable_part(b.output));
    CHECK(a.output.find("# timestamp") != std::string::npos);
    CHECK(a.output.find("# wall_time_s") != std::string::npos);
}

TEST_CASE("reports can be written to a file") {
    const std::string path = "cli_report.tmp";
    const RunResult r = run("theta --z 0+0i --tau 0+1i --out " + path);
    CHECK(r.exit_code == 0);
    std::ifstream is(path);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str().find("fqhe report v1") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("config file supplies defaults, flags win") {
    const std::string cfg = "cli_config.tmp";
    {
        std::ofstream os(cfg);
        os << "[gram]\nk=2\ntau=\"0+1i\"\ngrid=32\n";
    }
    const RunResult from_cfg = run("--config " + cfg + " gram");
    CHECK(from_cfg.exit_code == 0);
    CHECK(from_cfg.output.find("k 2") != std::string::npos);

    const RunResult overridden = run("--config " + cfg + " gram --k 3");
    CHECK(overridden.exit_code == 0);
    CHECK(overridden.output.find("k 3") != std::string::npos);
    std::remove(cfg.c_str());
}
