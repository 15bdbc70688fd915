#include <catch2/catch.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = POWALLOC_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

// Runs the CLI with output captured to a file; returns exit code and stdout.
RunResult run_cli(const std::string& args, const fs::path& scratch) {
    fs::path out_file = scratch / "stdout.txt";
    std::string command = kCli + " " + args + " > " + out_file.string() + " 2>&1";
    int status = std::system(command.c_str());
    RunResult result;
#ifdef _WIN32
    result.exit_code = status;
#else
    result.exit_code = WEXITSTATUS(status);
#endif
    std::ifstream in(out_file);
    std::stringstream buf;
    buf << in.rdbuf();
    result.stdout_text = buf.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("powalloc_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// small instance so CLI tests stay fast
void write_small_config(const fs::path& path, const std::string& extra = "") {
    std::ofstream out(path);
    out << R"({
      "problem": {
        "battery_capacity": 8,
        "noise": 5.0,
        "discount": 0.8,
        "channel_states": [1, 3, 5, 9],
        "channel_pmf": {"kind": "bell"},
        "recharge_pmf": {"kind": "decreasing", "support_max": 6}
      },
      "solver": {"epsilon": 1e-9, "max_iterations": 100000},
      "sim": {"traces": 500, "seed": 11, "start": {"energy": 8, "channel_index": 2}},
      "random_sweep": {"seed": 5, "instances": 6, "max_capacity": 6,
                       "max_channels": 3, "max_recharge": 5}
      )" << extra << "\n}\n";
}

} // namespace

TEST_CASE("solve writes tables and diagnostics", "[cli]") {
    fs::path scratch = fresh_scratch("solve");
    fs::path config = scratch / "config.json";
    write_small_config(config);

    RunResult run = run_cli("solve --config " + config.string() + " --out " +
                                (scratch / "out").string(),
                            scratch);
    INFO(run.stdout_text);
    REQUIRE(run.exit_code == 0);
    CHECK(fs::exists(scratch / "out" / "value_table.csv"));
    CHECK(fs::exists(scratch / "out" / "policy_table.csv"));
    CHECK(fs::exists(scratch / "out" / "diagnostics.txt"));

    std::string diag = slurp(scratch / "out" / "diagnostics.txt");
    CHECK(diag.find("natural logarithm") != std::string::npos);
    CHECK(diag.find("converged: yes") != std::string::npos);
    // value CSV: 9 energy levels x 4 channels + header
    std::string values = slurp(scratch / "out" / "value_table.csv");
    CHECK(std::count(values.begin(), values.end(), '\n') == 9 * 4 + 1);
    CHECK(values.rfind("energy,channel_index,channel_value,value\n", 0) == 0);
}

TEST_CASE("solve is byte-deterministic across runs", "[cli]") {
    fs::path scratch = fresh_scratch("determinism");
    fs::path config = scratch / "config.json";
    write_small_config(config);

    REQUIRE(run_cli("solve --config " + config.string() + " --out " +
                        (scratch / "a").string(),
                    scratch)
                .exit_code == 0);
    REQUIRE(run_cli("solve --config " + config.string() + " --out " +
                        (scratch / "b").string(),
                    scratch)
                .exit_code == 0);
    for (const char* name : {"value_table.csv", "policy_table.csv", "diagnostics.txt"})
        CHECK(slurp(scratch / "a" / name) == slurp(scratch / "b" / name));
}

TEST_CASE("invalid configs are rejected with exit code 2 and a field path", "[cli]") {
    fs::path scratch = fresh_scratch("invalid");
    fs::path config = scratch / "config.json";
    {
        std::ofstream out(config);
        out << R"({"problem": {"battery_capacity": 8, "noise": -5.0, "discount": 0.8,
                   "channel_states": [1, 3], "channel_pmf": {"kind": "uniform"},
                   "recharge_pmf": {"kind": "uniform", "support_max": 2}}})";
    }
    RunResult run = run_cli("solve --config " + config.string(), scratch);
    CHECK(run.exit_code == 2);
    CHECK(run.stdout_text.find("noise") != std::string::npos);

    RunResult missing = run_cli("solve --config " + (scratch / "nope.json").string(), scratch);
    CHECK(missing.exit_code == 2);

    // flag-level errors follow the same exit-code contract
    CHECK(run_cli("solve", scratch).exit_code == 2);
    CHECK(run_cli("frobnicate", scratch).exit_code == 2);
    CHECK(run_cli("--help", scratch).exit_code == 0);
}

TEST_CASE("verify exits 0 and writes the structure report", "[cli]") {
    fs::path scratch = fresh_scratch("verify");
    fs::path config = scratch / "config.json";
    write_small_config(config);

    RunResult run = run_cli("verify --config " + config.string() + " --out " +
                                (scratch / "out").string(),
                            scratch);
    INFO(run.stdout_text);
    REQUIRE(run.exit_code == 0);
    std::string report = slurp(scratch / "out" / "structure_report.txt");
    CHECK(report.find("policy monotone in energy: pass") != std::string::npos);
    CHECK(report.find("overall: pass") != std::string::npos);
}

TEST_CASE("verify self-test exercises the failure path and exits 1", "[cli]") {
    fs::path scratch = fresh_scratch("selftest");
    fs::path config = scratch / "config.json";
    write_small_config(config);

    RunResult run = run_cli("verify --self-test --config " + config.string() + " --out " +
                                (scratch / "out").string(),
                            scratch);
    INFO(run.stdout_text);
    CHECK(run.exit_code == 1);
    std::string report = slurp(scratch / "out" / "structure_selftest_report.txt");
    CHECK(report.find("FAIL") != std::string::npos);
    CHECK(report.find("value concave in energy: FAIL") != std::string::npos);
}

TEST_CASE("solver non-convergence exits 3 and labels the outputs", "[cli]") {
    fs::path scratch = fresh_scratch("nonconv");
    fs::path config = scratch / "config.json";
    {
        std::ofstream out(config);
        out << R"({
          "problem": {
            "battery_capacity": 8, "noise": 5.0, "discount": 0.9,
            "channel_states": [1, 3, 5, 9],
            "channel_pmf": {"kind": "bell"},
            "recharge_pmf": {"kind": "decreasing", "support_max": 6}
          },
          "solver": {"epsilon": 1e-12, "max_iterations": 2}
        })";
    }
    RunResult run = run_cli("solve --config " + config.string() + " --out " +
                                (scratch / "out").string(),
                            scratch);
    CHECK(run.exit_code == 3);
    std::string diag = slurp(scratch / "out" / "diagnostics.txt");
    CHECK(diag.find("converged: NO (result is partial)") != std::string::npos);
}

TEST_CASE("degenerate zero-capacity config solves to single-level zero tables", "[cli]") {
    fs::path scratch = fresh_scratch("degenerate");
    fs::path config = scratch / "config.json";
    {
        std::ofstream out(config);
        out << R"({
          "problem": {
            "battery_capacity": 0, "noise": 5.0, "discount": 0.8,
            "channel_states": [1, 3],
            "channel_pmf": {"kind": "uniform"},
            "recharge_pmf": {"kind": "uniform", "support_max": 2}
          }
        })";
    }
    RunResult run = run_cli("solve --config " + config.string() + " --out " +
                                (scratch / "out").string(),
                            scratch);
    REQUIRE(run.exit_code == 0);
    std::string values = slurp(scratch / "out" / "value_table.csv");
    CHECK(values == "energy,channel_index,channel_value,value\n0,1,1,0\n0,2,3,0\n");
    std::string policy = slurp(scratch / "out" / "policy_table.csv");
    CHECK(policy == "energy,channel_index,channel_value,power\n0,1,1,0\n0,2,3,0\n");
}

TEST_CASE("figures produces the four data files", "[cli]") {
    fs::path scratch = fresh_scratch("figures");
    fs::path config = scratch / "config.json";
    write_small_config(config);

    RunResult run = run_cli("figures --config " + config.string() + " --out " +
                                (scratch / "out").string(),
                            scratch);
    INFO(run.stdout_text);
    REQUIRE(run.exit_code == 0);
    for (const char* name : {"policy_by_channel.csv", "value_by_channel.csv",
                             "policy_by_recharge.csv", "policy_by_discount.csv"}) {
        REQUIRE(fs::exists(scratch / "out" / name));
        CHECK(slurp(scratch / "out" / name).rfind("energy,series,value\n", 0) == 0);
    }
    std::string recharge = slurp(scratch / "out" / "policy_by_recharge.csv");
    CHECK(recharge.find("decreasing") != std::string::npos);
    CHECK(recharge.find("increasing") != std::string::npos);
    std::string discount = slurp(scratch / "out" / "policy_by_discount.csv");
    CHECK(discount.find("lambda=0.9") != std::string::npos);
}

TEST_CASE("simulate with the zero baseline reports exactly zero", "[cli]") {
    fs::path scratch = fresh_scratch("simulate");
    fs::path config = scratch / "config.json";
    write_small_config(config);

    RunResult run = run_cli("simulate --config " + config.string() + " --policy zero --out " +
                                (scratch / "out").string(),
                            scratch);
    INFO(run.stdout_text);
    REQUIRE(run.exit_code == 0);
    std::string report = slurp(scratch / "out" / "sim_report.txt");
    CHECK(report.find("estimate: 0\n") != std::string::npos);
    CHECK(report.find("policy: zero") != std::string::npos);
}

TEST_CASE("simulate defaults the start state to full battery, best channel", "[cli]") {
    fs::path scratch = fresh_scratch("simulate_default_start");
    fs::path config = scratch / "config.json";
    {
        std::ofstream out(config);
        out << R"({
          "problem": {
            "battery_capacity": 8, "noise": 5.0, "discount": 0.8,
            "channel_states": [1, 3, 5, 9],
            "channel_pmf": {"kind": "bell"},
            "recharge_pmf": {"kind": "decreasing", "support_max": 6}
          },
          "sim": {"traces": 50, "seed": 3}
        })";
    }
    RunResult run = run_cli("simulate --config " + config.string() + " --policy zero --out " +
                                (scratch / "out").string(),
                            scratch);
    REQUIRE(run.exit_code == 0);
    std::string report = slurp(scratch / "out" / "sim_report.txt");
    CHECK(report.find("start: energy=8 channel_index=4") != std::string::npos);
}

TEST_CASE("simulate the optimal policy prints the oracle gap", "[cli]") {
    fs::path scratch = fresh_scratch("simulate_opt");
    fs::path config = scratch / "config.json";
    write_small_config(config);

    RunResult run = run_cli("simulate --config " + config.string() +
                                " --policy optimal --traces 800 --out " +
                                (scratch / "out").string(),
                            scratch);
    INFO(run.stdout_text);
    REQUIRE(run.exit_code == 0);
    std::string report = slurp(scratch / "out" / "sim_report.txt");
    CHECK(report.find("gap:") != std::string::npos);
    CHECK(report.find("gap_threshold_3se_plus_bias:") != std::string::npos);
}

TEST_CASE("simulate accepts a solved policy CSV and rejects mismatched ones", "[cli]") {
    fs::path scratch = fresh_scratch("simulate_csv");
    fs::path config = scratch / "config.json";
    write_small_config(config);

    REQUIRE(run_cli("solve --config " + config.string() + " --out " +
                        (scratch / "out").string(),
                    scratch)
                .exit_code == 0);
    RunResult run = run_cli("simulate --config " + config.string() + " --policy " +
                                (scratch / "out" / "policy_table.csv").string() + " --out " +
                                (scratch / "sim").string(),
                            scratch);
    INFO(run.stdout_text);
    REQUIRE(run.exit_code == 0);

    // a policy table for different dimensions must be rejected
    std::ofstream bad(scratch / "bad_policy.csv");
    bad << "energy,channel_index,channel_value,power\n0,1,1,0\n";
    bad.close();
    RunResult rejected = run_cli("simulate --config " + config.string() + " --policy " +
                                     (scratch / "bad_policy.csv").string() + " --out " +
                                     (scratch / "sim2").string(),
                                 scratch);
    CHECK(rejected.exit_code == 2);
}

TEST_CASE("sweep runs clean and respects the instances flag", "[cli]") {
    fs::path scratch = fresh_scratch("sweep");
    fs::path config = scratch / "config.json";
    write_small_config(config);

    RunResult run = run_cli("sweep --config " + config.string() + " --instances 4 --out " +
                                (scratch / "out").string(),
                            scratch);
    INFO(run.stdout_text);
    REQUIRE(run.exit_code == 0);
    std::string report = slurp(scratch / "out" / "sweep_report.txt");
    CHECK(report.find("4/4 instances solved") != std::string::npos);
    CHECK(report.find("overall: pass") != std::string::npos);
}
