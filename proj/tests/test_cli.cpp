#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

CommandResult run_cli(const std::string& args) {
    const fs::path out_file = fs::temp_directory_path() / "isp_cli_output.txt";
    const std::string cmd =
        std::string(ISP_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CommandResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream in(out_file);
    std::ostringstream text;
    text << in.rdbuf();
    r.output = text.str();
    return r;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

const fs::path kScenarioDir{ISP_SCENARIO_DIR};

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "isp_cli_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("help lists the subcommands") {
    const CommandResult r = run_cli("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("design") != std::string::npos);
    CHECK(r.output.find("run") != std::string::npos);
    CHECK(r.output.find("metrics") != std::string::npos);
    CHECK(r.output.find("verify") != std::string::npos);
}

TEST_CASE("design then run then metrics round trip") {
    TempDir tmp;
    const std::string scenario = (kScenarioDir / "step_yaw.json").string();

    const CommandResult design =
        run_cli("design --scenario " + scenario + " --out " + tmp.path.string());
    CHECK(design.exit_code == 0);
    const fs::path designed = tmp.path / "step_yaw.designed.json";
    REQUIRE(fs::exists(designed));
    CHECK(fs::exists(tmp.path / "step_yaw.design_report.txt"));
    CHECK(design.output.find("closed-loop bandwidth") != std::string::npos);

    const CommandResult run =
        run_cli("run --scenario " + designed.string() + " --out " + tmp.path.string());
    CHECK(run.exit_code == 0);
    const fs::path telemetry = tmp.path / "step_yaw.telemetry.csv";
    REQUIRE(fs::exists(telemetry));
    CHECK(fs::exists(tmp.path / "step_yaw.summary.txt"));

    const CommandResult metrics =
        run_cli("metrics --telemetry " + telemetry.string() + " --out " + tmp.path.string());
    CHECK(metrics.exit_code == 0);
    CHECK(metrics.output.find("Max jitter") != std::string::npos);
}

TEST_CASE("run refuses an undesigned scenario") {
    TempDir tmp;
    const std::string scenario = (kScenarioDir / "step_yaw.json").string();
    const CommandResult r =
        run_cli("run --scenario " + scenario + " --out " + tmp.path.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("design") != std::string::npos);
}

TEST_CASE("repeated runs produce byte-identical telemetry") {
    TempDir tmp;
    const std::string scenario = (kScenarioDir / "static_jitter.json").string();
    REQUIRE(run_cli("design --scenario " + scenario + " --out " + tmp.path.string()).exit_code ==
            0);
    const std::string designed = (tmp.path / "static_jitter.designed.json").string();

    const fs::path dir_a = tmp.path / "a";
    const fs::path dir_b = tmp.path / "b";
    REQUIRE(run_cli("run --scenario " + designed + " --out " + dir_a.string()).exit_code == 0);
    REQUIRE(run_cli("run --scenario " + designed + " --out " + dir_b.string()).exit_code == 0);

    const std::string a = slurp(dir_a / "static_jitter.telemetry.csv");
    const std::string b = slurp(dir_b / "static_jitter.telemetry.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);

    // A different seed changes the bytes.
    const fs::path dir_c = tmp.path / "c";
    REQUIRE(run_cli("run --scenario " + designed + " --seed 77 --out " + dir_c.string())
                .exit_code == 0);
    CHECK(slurp(dir_c / "static_jitter.telemetry.csv") != a);
}

TEST_CASE("malformed config exits nonzero and names the key") {
    TempDir tmp;
    const fs::path bad = tmp.path / "bad.json";
    std::ofstream(bad) << "{\"controllers\": {}, \"run\": {\"duration_s\": 1}}";
    const CommandResult r =
        run_cli("design --scenario " + bad.string() + " --out " + tmp.path.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("stab_yaw") != std::string::npos);
}

TEST_CASE("missing scenario file exits nonzero") {
    const CommandResult r = run_cli("run --scenario /nonexistent.json");
    CHECK(r.exit_code == 1);
}
