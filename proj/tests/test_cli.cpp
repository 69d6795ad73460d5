#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "hmmorder_cli_test";
    fs::create_directories(dir);
    return dir;
}

Run run(const std::string& args) {
    const fs::path log = scratch() / "stdout.txt";
    const std::string cmd = std::string(HMM_ORDER_BIN) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate then estimate") {
    const fs::path data = scratch() / "shift.txt";
    const Run sim = run("simulate --scenario shift --n 400 --seed 7 --out " + data.string());
    REQUIRE(sim.code == 0);
    CHECK(fs::exists(data));

    const fs::path diag = scratch() / "diag.csv";
    const Run est = run("estimate --input " + data.string() + " --diagnostics " + diag.string());
    CHECK(est.code == 0);
    CHECK(est.out.find("L_hat = ") != std::string::npos);
    CHECK(est.out.find("n = 400, d = 1, h = ") != std::string::npos);
    CHECK(slurp(diag).rfind("ell,r_ell,tau,exceeds\n", 0) == 0);

    const Run huge = run("estimate --input " + data.string() + " --tau 1e9");
    CHECK(huge.code == 0);
    CHECK(huge.out.find("L_hat = 0") != std::string::npos);

    const Run tiny = run("estimate --input " + data.string() + " --tau 1e-300 --lmax 4");
    CHECK(tiny.out.find("L_hat = 4") != std::string::npos);
    CHECK(tiny.out.find("warning") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run("estimate").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("estimate --input x --kappa wide").code == 2);
    CHECK(run("estimate --input /nonexistent/data.txt").code == 3);

    const fs::path bad = scratch() / "bad.txt";
    std::ofstream(bad) << "1.0\n2.0\nthree\n";
    const Run r = run("estimate --input " + bad.string());
    CHECK(r.code == 3);
    CHECK(r.out.find("line 3") != std::string::npos);

    const fs::path cfg = scratch() / "bad.cfg";
    std::ofstream(cfg) << "colour = red\n";
    CHECK(run("experiment --config " + cfg.string() + " --out " + (scratch() / "t.csv").string()).code == 2);
}

TEST_CASE("experiment tables") {
    const fs::path cfg = scratch() / "grid.cfg";
    std::ofstream(cfg) << "scenario = gauss3\nn_list = 150\nreplicates = 2\nM = 20\nM_reg = 5\n";
    const fs::path out = scratch() / "cmp.md";
    const Run r = run("compare-spectral --config " + cfg.string() + " --out " + out.string() + " --format md");
    CHECK(r.code == 0);
    const std::string table = slurp(out);
    CHECK(table.find("| operator-multivariate |") != std::string::npos);
    CHECK(table.find("| spectral(M=20,M_reg=5) |") != std::string::npos);

    const fs::path csv = scratch() / "exp.csv";
    CHECK(run("experiment --config " + cfg.string() + " --out " + csv.string() + " --timing --jobs 2").code == 0);
    CHECK(slurp(csv).find("mean_wall_s") != std::string::npos);
    fs::remove_all(scratch());
}

}  // TEST_SUITE
