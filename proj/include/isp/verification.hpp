// The bundled replication suite: every performance criterion the project is
// checked against, each with its tolerance pinned in code. Used by the `isp
// verify` subcommand and by the acceptance test binary.

#pragma once

#include "isp/simulation.hpp"

#include <string>
#include <vector>

namespace isp {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // measured value(s) and tolerance
};

/// Runs every criterion against the bundled scenarios in `scenario_dir`.
/// Individual scenario failures (missing file, divergence) mark the criterion
/// failed rather than aborting the suite.
std::vector<CriterionResult> run_acceptance_criteria(const std::string& scenario_dir);

/// One pass/fail line per criterion.
std::string format_criteria_report(const std::vector<CriterionResult>& results);

/// Loads a bundled scenario and designs its controllers when the file does
/// not already carry coefficients.
Scenario load_bundled_scenario(const std::string& scenario_dir, const std::string& name);

} // namespace isp
