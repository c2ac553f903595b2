#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(PARAX_CLI_PATH) + " " + args +
                      " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("parax_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

size_t count_lines(const std::string& s) {
    size_t n = 0;
    for (char c : s)
        if (c == '\n')
            ++n;
    return n;
}

} // namespace

TEST_CASE("fig1 emits csv, plot script and manifest") {
    fs::path d = fresh_dir("fig1");
    REQUIRE(run("fig1 --out " + d.string() + " --steps 4 --zc-ratios 1,10") ==
            0);
    std::string csv = slurp(d / "fig1.csv");
    CHECK(csv.rfind("z_over_zsca,zc_ratio,S\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 4 * 2);
    std::string manifest = slurp(d / "manifest.json");
    CHECK(manifest.find("\"command\": \"fig1\"") != std::string::npos);
    CHECK(manifest.find("\"seed\"") != std::string::npos);
    CHECK(slurp(d / "fig1.gp").find("plot") != std::string::npos);
}

TEST_CASE("fig2 table contains the unit-cv point") {
    fs::path d = fresh_dir("fig2");
    REQUIRE(run("fig2 --out " + d.string() + " --n 3") == 0);
    std::string csv = slurp(d / "fig2.csv");
    CHECK(csv.rfind("r_s_bar,xi_s_bar,cv\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 9);
    CHECK(csv.find("0.5,1,1\n") != std::string::npos);
}

TEST_CASE("moments eval prints and persists the value") {
    fs::path d = fresh_dir("moments");
    REQUIRE(run("moments eval --quantity mu1 --z 0 --point 0,0 --out " +
                d.string()) == 0);
    std::string out = slurp(d / "moments.json");
    CHECK(out.find("\"value_re\": 1.0") != std::string::npos);
    CHECK(out.find("\"method\": \"closed_form\"") != std::string::npos);
    CHECK(out.find("\"converged\": true") != std::string::npos);
    CHECK(out.find("\"manifest\"") != std::string::npos);
}

TEST_CASE("invalid invocations exit with code 2") {
    fs::path d = fresh_dir("bad");
    CHECK(run("moments eval --quantity nope --out " + d.string()) == 2);
    CHECK(run("fig1 --no-such-flag") == 2);
    CHECK(run("fig1 --steps 0 --out " + d.string()) == 2);

    std::ofstream(d / "bad.ini") << "covariance.c0 = -1\n";
    CHECK(run("moments eval --quantity mu1 --config " +
              (d / "bad.ini").string() + " --out " + d.string()) == 2);
}

TEST_CASE("mc run writes stats with predictions") {
    fs::path d = fresh_dir("mc");
    std::ofstream(d / "mc.ini") << "sim.epsilon = 0.5\n"
                                   "sim.z = 0.5\n"
                                   "sim.dz = 0.25\n"
                                   "sim.realizations = 8\n"
                                   "grid.n = 64\n"
                                   "grid.h = 0.3\n"
                                   "probes.mean = 0,0\n"
                                   "probes.intensity = 0,0\n";
    REQUIRE(run("mc --config " + (d / "mc.ini").string() + " --out " +
                d.string()) == 0);
    std::string out = slurp(d / "stats.json");
    CHECK(out.find("\"mean\"") != std::string::npos);
    CHECK(out.find("\"prediction\"") != std::string::npos);
    CHECK(out.find("\"manifest\"") != std::string::npos);
}

TEST_CASE("gsr-check reports a residual with its error bar") {
    fs::path d = fresh_dir("gsr");
    std::ofstream(d / "g.ini") << "sim.epsilon = 0.5\n"
                                  "sim.z = 0.5\n"
                                  "sim.dz = 0.25\n"
                                  "sim.realizations = 16\n"
                                  "grid.n = 64\n"
                                  "grid.h = 0.3\n";
    REQUIRE(run("gsr-check --config " + (d / "g.ini").string() + " --out " +
                d.string()) == 0);
    std::string out = slurp(d / "gsr.json");
    CHECK(out.find("\"residual\"") != std::string::npos);
    CHECK(out.find("\"se\"") != std::string::npos);
}

TEST_CASE("wigner summary includes the coefficient of variation") {
    fs::path d = fresh_dir("wigner");
    REQUIRE(run("wigner --z 0 --r 0,0 --xi 0,0 --xis 1.5 --out " +
                d.string()) == 0);
    std::string out = slurp(d / "wigner.json");
    CHECK(out.find("\"mean\"") != std::string::npos);
    CHECK(out.find("\"cv\"") != std::string::npos);
}
