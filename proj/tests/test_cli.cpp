// Process-level checks of the command-line front end. The binary path comes
// from the ROBSIM_BIN environment variable (set by ctest).
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* b = std::getenv("ROBSIM_BIN");
    REQUIRE_MESSAGE(b != nullptr, "ROBSIM_BIN not set");
    return b;
}

struct RunOut {
    int exit_code = -1;
    std::string output;
};

RunOut run(const std::string& args) {
    const std::string cmd = "ROBSIM_THREADS=1 " + bin() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunOut out;
    char buf[512];
    while (fgets(buf, sizeof(buf), pipe)) out.output += buf;
    const int status = pclose(pipe);
    out.exit_code = WEXITSTATUS(status);
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    os << text;
}

const char* kSmallConfig =
    "domain.nx = 16\n"
    "domain.ny = 16\n"
    "domain.nz = 8\n"
    "physics.mu = 0.02\n"
    "physics.kappa = 0.02\n"
    "physics.alpha = 0.4\n"
    "physics.theta_b = sinprod:0.5,1,1,0\n"
    "time.dt = 0.005\n"
    "time.t_end = 0.05\n"
    "init.velocity = stream:0.2,1,1\n"
    "init.theta = sinprod:0.2,1,1,1\n"
    "nudging.lambda = 10\n"
    "nudging.interp = volume:0.25\n"
    "nudging.spinup = 0.05\n";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("cli_test") / name) {
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all("cli_test", ec); }
    std::string operator/(const std::string& s) const { return (path / s).string(); }
};

} // namespace

std::string with_t_end_zero() {
    std::string s(kSmallConfig);
    const std::string key = "time.t_end = 0.05";
    s.replace(s.find(key), key.size(), "time.t_end = 0");
    return s;
}

TEST_CASE("simulate with t_end = 0 writes one snapshot and exits 0") {
    TempDir tmp("t0");
    write_file(tmp / "cfg", with_t_end_zero());
    RunOut r = run("simulate --config " + (tmp / "cfg") + " --out " + (tmp / "out"));
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    CHECK(fs::exists(tmp / "out/vel_000000.rob"));
    CHECK(!fs::exists(tmp / "out/vel_000001.rob"));
    CHECK(fs::exists(tmp / "out/series.csv"));
    CHECK(fs::exists(tmp / "out/config.resolved"));
}

TEST_CASE("config errors exit with code 2 and the error name") {
    TempDir tmp("cfgerr");
    write_file(tmp / "bad", "physics.alpha = 1.5\nmode = longtime\n");
    RunOut r = run("simulate --config " + (tmp / "bad") + " --out " + (tmp / "o"));
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("ValidationError") != std::string::npos);

    write_file(tmp / "dup", "time.dt = 0.01\ntime.dt = 0.01\n");
    r = run("simulate --config " + (tmp / "dup") + " --out " + (tmp / "o"));
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("ParseError") != std::string::npos);
}

TEST_CASE("missing files exit with the io code") {
    RunOut r = run("simulate --config does_not_exist.cfg --out cli_tmp_out");
    CHECK(r.exit_code == 4);
    CHECK(r.output.find("IoError") != std::string::npos);
}

TEST_CASE("bad ROBSIM_THREADS is rejected") {
    const std::string cmd = "ROBSIM_THREADS=zero " + bin() + " simulate --config x --out y 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[256];
    while (fgets(buf, sizeof(buf), pipe)) out += buf;
    const int code = WEXITSTATUS(pclose(pipe));
    CHECK(code == 2);
    CHECK(out.find("ValidationError") != std::string::npos);
}

TEST_CASE("simulate, observe, assimilate, diagnose pipeline") {
    TempDir tmp("pipe");
    write_file(tmp / "cfg", kSmallConfig);
    RunOut r = run("simulate --config " + (tmp / "cfg") + " --out " + (tmp / "ref"));
    CHECK_MESSAGE(r.exit_code == 0, r.output);

    r = run("observe --traj " + (tmp / "ref") + " --interp volume:0.25 --every 0 --out " +
            (tmp / "obs.robobs"));
    CHECK_MESSAGE(r.exit_code == 0, r.output);

    r = run("assimilate --config " + (tmp / "cfg") + " --obs " + (tmp / "obs.robobs") +
            " --lambda 10 --out " + (tmp / "assim"));
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    CHECK(fs::exists(tmp / "assim/assim_series.csv"));

    // mismatched interpolant scale is a spec mismatch, nonzero exit
    r = run("observe --traj " + (tmp / "ref") + " --interp volume:0.5 --every 0 --out " +
            (tmp / "obs2.robobs"));
    CHECK(r.exit_code == 0);
    r = run("assimilate --config " + (tmp / "cfg") + " --obs " + (tmp / "obs2.robobs") +
            " --lambda 10 --out " + (tmp / "assim2"));
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("SpecMismatch") != std::string::npos);

    r = run("diagnose --traj " + (tmp / "ref") + " --out " + (tmp / "report.csv"));
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    CHECK(r.output.find("max_principle=pass") != std::string::npos);
    std::ifstream is(tmp / "report.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,ke,thermal,res_a6,res_a7,theta_max,theta_min,u_h1,theta_h1,theta_inf");
}

TEST_CASE("twin command reports decay and writes the error series") {
    TempDir tmp("twin");
    write_file(tmp / "cfg", kSmallConfig);
    RunOut r = run("twin --config " + (tmp / "cfg") + " --lambda 20 --interp volume:0.25 --out " +
                   (tmp / "tw"));
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    CHECK(fs::exists(tmp / "tw/twin_series.csv"));
    std::ifstream is(tmp / "tw/twin_series.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,vel_err,theta_err,lyapunov");
    CHECK(fs::exists(tmp / "tw/ref/vel_000001.rob"));
    CHECK(fs::exists(tmp / "tw/nudged/vel_000001.rob"));
}

TEST_CASE("resolved config round trips through the parser") {
    TempDir tmp("re");
    write_file(tmp / "cfg0", with_t_end_zero());
    RunOut r = run("simulate --config " + (tmp / "cfg0") + " --out " + (tmp / "out"));
    CHECK(r.exit_code == 0);
    // feed the resolved dump back in
    r = run("simulate --config " + (tmp / "out/config.resolved") + " --out " + (tmp / "out2"));
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    std::ifstream a(tmp / "out/config.resolved"), b(tmp / "out2/config.resolved");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("tune command writes a parseable parameter fragment") {
    TempDir tmp("tune");
    std::string cfg(kSmallConfig);
    cfg += "tune.lambda0 = 4\ntune.delta0 = 0.25\ntune.probe_t = 0.25\n"
           "tune.transient = 0.1\ntune.decay_target = 0.9\n";
    write_file(tmp / "cfg", cfg);
    RunOut r = run("tune --config " + (tmp / "cfg") + " --out " + (tmp / "tuned.cfg"));
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    std::ifstream is(tmp / "tuned.cfg");
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(text.find("nudging.lambda = ") != std::string::npos);
    CHECK(text.find("nudging.interp = volume:") != std::string::npos);
}

TEST_CASE("numerical failures exit with code 3 and dump the last state") {
    TempDir tmp("cfl");
    std::string cfg(kSmallConfig);
    const std::string key = "init.velocity = stream:0.2,1,1";
    cfg.replace(cfg.find(key), key.size(), "init.velocity = stream:20,1,1");
    write_file(tmp / "cfg", cfg);
    RunOut r = run("simulate --config " + (tmp / "cfg") + " --out " + (tmp / "out"));
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("CFLViolation") != std::string::npos);
    CHECK(fs::exists(tmp / "out/vel_000001.rob")); // last good state dumped
}
