// Command-line front end: design controllers, run scenarios, compute metrics
// from telemetry, and verify the bundled replication suite.
//
// Exit codes: 0 success, 1 validation error, 2 runtime divergence,
// 3 verification failure.

#include "isp/config.hpp"
#include "isp/metrics.hpp"
#include "isp/verification.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitVerifyFailed = 3;

std::string default_out_root() {
    if (const char* env = std::getenv("ISP_OUT_ROOT")) {
        return env;
    }
    return "out";
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << text;
}

std::string design_report_text(const isp::ScenarioDesignReport& rep) {
    std::ostringstream out;
    const auto row = [&](const char* name, const isp::DesignResult& d) {
        out << name << ":\n"
            << "  kp = " << d.kp << (d.ki > 0.0 ? "  ki = " + std::to_string(d.ki) + " rad/s" : "")
            << "\n"
            << "  open-loop crossover  = " << d.crossover_hz << " Hz\n"
            << "  phase margin         = "
            << (d.phase_margin_deg ? std::to_string(*d.phase_margin_deg) + " deg" : "unbounded")
            << "\n"
            << "  gain margin          = "
            << (d.gain_margin_db ? std::to_string(*d.gain_margin_db) + " dB" : "unbounded") << "\n"
            << "  closed-loop bandwidth = " << d.closed_loop_bandwidth_hz << " Hz\n"
            << "  resonance peak        = " << d.closed_loop_resonance_db << " dB\n";
    };
    row("stabilization yaw", rep.stab_yaw);
    row("stabilization pitch", rep.stab_pitch);
    row("tracking yaw", rep.track_yaw);
    row("tracking pitch", rep.track_pitch);
    return out.str();
}

int cmd_design(const std::string& scenario_path, const std::string& out, bool quiet) {
    isp::Scenario sc = isp::load_scenario(scenario_path);
    isp::ScenarioDesignReport rep;
    try {
        rep = isp::design_controllers(sc);
    } catch (const isp::DesignError& e) {
        std::cerr << "design failed: " << e.what() << "\n";
        return kExitValidation;
    }
    const fs::path dir = ensure_out_dir(out);
    const std::string stem = fs::path(scenario_path).stem().string();
    const fs::path designed = dir / (stem + ".designed.json");
    isp::save_scenario(sc, designed.string());
    const std::string report = design_report_text(rep);
    write_text(dir / (stem + ".design_report.txt"), report);
    if (!quiet) {
        std::cout << report << "wrote " << designed.string() << "\n";
    }
    return kExitOk;
}

int cmd_run(const std::string& scenario_path, const std::string& out,
            std::optional<std::uint64_t> seed, bool quiet) {
    isp::Scenario sc = isp::load_scenario(scenario_path);
    if (!sc.stab_yaw.designed() || !sc.stab_pitch.designed() ||
        (sc.tracking_enabled && !sc.yaw_rate_command &&
         (!sc.track_yaw.designed() || !sc.track_pitch.designed()))) {
        std::cerr << "scenario has no designed controllers; run `isp design` first\n";
        return kExitValidation;
    }
    if (seed) {
        sc.seed = *seed;
    }
    const fs::path dir = ensure_out_dir(out);
    const fs::path csv = dir / (sc.name + ".telemetry.csv");

    isp::TelemetryLog log;
    try {
        isp::run_scenario(sc, log);
    } catch (const isp::DivergenceError& e) {
        isp::save_telemetry_csv(log, csv.string()); // flush the partial log
        std::cerr << "run diverged: " << e.what() << " (partial telemetry in " << csv.string()
                  << ")\n";
        return kExitDivergence;
    }
    isp::save_telemetry_csv(log, csv.string());
    const std::string table = isp::summary_table(log);
    write_text(dir / (sc.name + ".summary.txt"), table);
    write_text(dir / (sc.name + ".summary.csv"), isp::summary_csv(log));
    if (!quiet) {
        std::cout << table << "wrote " << csv.string() << "\n";
    }
    return kExitOk;
}

int cmd_metrics(const std::string& telemetry_path, const std::string& out, bool quiet) {
    const isp::TelemetryLog log = isp::load_telemetry_csv(telemetry_path);
    const std::string table = isp::summary_table(log);
    const fs::path dir = ensure_out_dir(out);
    const std::string stem = fs::path(telemetry_path).stem().string();
    write_text(dir / (stem + ".summary.txt"), table);
    write_text(dir / (stem + ".summary.csv"), isp::summary_csv(log));
    if (!quiet) {
        std::cout << table;
    }
    return kExitOk;
}

int cmd_verify(const std::string& scenario_dir, bool quiet) {
    const auto results = isp::run_acceptance_criteria(scenario_dir);
    const std::string report = isp::format_criteria_report(results);
    if (!quiet) {
        std::cout << report;
    }
    for (const auto& r : results) {
        if (!r.pass) {
            return kExitVerifyFailed;
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-axis stabilised platform simulator and control design toolkit"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string telemetry_path;
    std::string out = default_out_root();
    std::string scenario_dir = "scenarios";
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_flag("--quiet,-q", quiet, "suppress stdout reports");

    CLI::App* design = app.add_subcommand("design", "design controllers for a scenario");
    design->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    design->add_option("--out", out, "output directory (default $ISP_OUT_ROOT or ./out)");

    CLI::App* run = app.add_subcommand("run", "run a scenario and write telemetry");
    run->add_option("--scenario", scenario_path, "designed scenario JSON file")->required();
    run->add_option("--out", out, "output directory");
    run->add_option("--seed", seed, "override the scenario master seed");

    CLI::App* metrics = app.add_subcommand("metrics", "summarize a telemetry CSV");
    metrics->add_option("--telemetry", telemetry_path, "telemetry CSV file")->required();
    metrics->add_option("--out", out, "output directory");

    CLI::App* verify = app.add_subcommand("verify", "run the bundled replication suite");
    verify->add_option("--scenario-dir", scenario_dir, "directory with the bundled scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) {
            return cmd_design(scenario_path, out, quiet);
        }
        if (run->parsed()) {
            return cmd_run(scenario_path, out, seed, quiet);
        }
        if (metrics->parsed()) {
            return cmd_metrics(telemetry_path, out, quiet);
        }
        if (verify->parsed()) {
            return cmd_verify(scenario_dir, quiet);
        }
    } catch (const isp::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
