#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "selfwalk/csv.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SELFWALK_CLI_PATH;

struct CliResult {
    int code;
    std::string out;
};

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "selfwalk_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args, const std::string& env = "") {
    fs::path out_file = scratch_dir() / "stdout.txt";
    std::string cmd = env + (env.empty() ? "" : " ") + kCli + " " + args + " > " +
                      out_file.string() + " 2>&1";
    int raw = std::system(cmd.c_str());
    int code = raw < 0 ? raw : WEXITSTATUS(raw);
    return {code, selfwalk::read_file(out_file.string())};
}

}  // namespace

TEST_CASE("cli run writes provenance-headed csv files") {
    fs::path prefix = scratch_dir() / "tsrw";
    CliResult r = run_cli("run --preset tsrw --steps 20000 --seed 7 --out-prefix " +
                          prefix.string() + " --slope");
    CHECK(r.code == 0);
    std::string traj = selfwalk::read_file(prefix.string() + "_trajectory.csv");
    CHECK(traj.rfind("# selfwalk", 0) == 0);
    CHECK(traj.find("rng=splitmix64") != std::string::npos);
    CHECK(traj.find("n,position,range_min,range_max") != std::string::npos);
    std::string prof = selfwalk::read_file(prefix.string() + "_profile.csv");
    CHECK(prof.find("edge_left_endpoint,count,initial_value") != std::string::npos);

    // re-running reproduces the files byte-identically
    fs::path prefix2 = scratch_dir() / "tsrw2";
    run_cli("run --preset tsrw --steps 20000 --seed 7 --out-prefix " + prefix2.string());
    CHECK(selfwalk::read_file(prefix2.string() + "_trajectory.csv") == traj);
}

TEST_CASE("cli rejects bad kernels and unknown presets") {
    CHECK(run_cli("run --kernel \"-1/2:1\" --steps 10").code == 2);
    CHECK(run_cli("run --preset nope --steps 10").code == 2);
    CHECK(run_cli("run --steps 10").code == 2);  // neither kernel nor preset
    CHECK(run_cli("bogus-subcommand").code == 2);
}

TEST_CASE("cli accepts the symmetric-family literal") {
    fs::path prefix = scratch_dir() / "fam";
    CHECK(run_cli("run --kernel 0.5,0.5 --steps 5000 --seed 1 --out-prefix " + prefix.string())
              .code == 0);
}

TEST_CASE("cli gibbs-check verdicts") {
    CHECK(run_cli("gibbs-check --preset tsrw --w 2 --H 3").code == 0);
    CHECK(run_cli("gibbs-check --preset third_derivative --w 2 --H 3").code == 2);
    CHECK(run_cli("gibbs-check --preset tsrw --w 5 --H 3").code == 3);
}

TEST_CASE("cli sweep is deterministic, resumable, and flags empty grids") {
    fs::path out1 = scratch_dir() / "sweep1.csv";
    fs::path out2 = scratch_dir() / "sweep2.csv";
    std::string grid =
        " --a-min -0.5 --a-max 0.5 --a-steps 2 --b-min 0.75 --b-max 1.5 --b-steps 2"
        " --seeds 2 --steps 1000000 --master-seed 11 --out ";

    CHECK(run_cli("sweep" + grid + out1.string(), "SELFWALK_THREADS=1").code == 0);
    CHECK(run_cli("sweep" + grid + out2.string(), "SELFWALK_THREADS=2").code == 0);
    CHECK(selfwalk::read_file(out1.string()) == selfwalk::read_file(out2.string()));

    // resume: final file removed, parts kept -> identical bytes again
    fs::remove(out1);
    CHECK(run_cli("sweep" + grid + out1.string(), "SELFWALK_THREADS=2").code == 0);
    CHECK(selfwalk::read_file(out1.string()) == selfwalk::read_file(out2.string()));

    CHECK(run_cli("sweep --seeds 2 --steps 1000 --out " + (scratch_dir() / "e.csv").string())
              .code == 2);

    // a point whose runs throw is marked failed and the sweep exits 1
    fs::path failed = scratch_dir() / "failed.csv";
    CliResult r = run_cli("sweep --a-min 0 --a-max 0 --a-steps 1 --b-min 1 --b-max 1 --b-steps 1"
                          " --seeds 2 --steps 1000 --master-seed 3 --out " +
                          failed.string());
    CHECK(r.code == 1);
    CHECK(selfwalk::read_file(failed.string()).find(",failed,") != std::string::npos);
}

TEST_CASE("cli classify and stuck-scan emit rows") {
    fs::path out = scratch_dir() / "cls.csv";
    CHECK(run_cli("classify --preset ballistic --steps 1000000 --seeds 2 --master-seed 3 --out " +
                  out.string())
              .code == 0);
    std::string csv = selfwalk::read_file(out.string());
    CHECK(csv.find("kernel,a,b,seed,slope,stderr,label,k_sites") != std::string::npos);
    CHECK(csv.find("ballistic") != std::string::npos);

    fs::path scan = scratch_dir() / "scan.csv";
    CHECK(run_cli("stuck-scan --b 3 --k-min 1 --k-max 2 --per-interval 1 --steps 20000 "
                  "--seeds 2 --master-seed 5 --out " +
                  scan.string())
              .code == 0);
    CHECK(selfwalk::read_file(scan.string()).find("k,ratio,a,b,seed,predicted_sites") !=
          std::string::npos);
}

TEST_CASE("cli honors a key-value config file") {
    fs::path cfg = scratch_dir() / "run.cfg";
    fs::path prefix = scratch_dir() / "cfgd";
    {
        std::ofstream f(cfg);
        f << "[run]\nsteps=5000\nseed=9\n";
    }
    CHECK(run_cli("run --preset tsrw --config " + cfg.string() + " --out-prefix " +
                  prefix.string())
              .code == 0);
    std::string traj = selfwalk::read_file(prefix.string() + "_trajectory.csv");
    CHECK(traj.find("steps=5000") != std::string::npos);
    // flags win over the config file
    CHECK(run_cli("run --preset tsrw --config " + cfg.string() + " --steps 600 --out-prefix " +
                  prefix.string())
              .code == 0);
    CHECK(selfwalk::read_file(prefix.string() + "_trajectory.csv").find("steps=600") !=
          std::string::npos);
}
