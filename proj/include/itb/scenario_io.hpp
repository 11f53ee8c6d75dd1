#pragma once

// Scenario files (JSON) and metric tables (CSV / JSON).

#include <filesystem>
#include <string>
#include <vector>

#include "itb/harness.hpp"

namespace itb {

std::string scenario_to_json(const Scenario& s, int indent = 2);

/// Accepts a bare scenario object or a run document carrying a "scenario" key.
/// Throws ScenarioInvalid on malformed input or unknown keys.
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// "initial.sigma=2", "schedule=[1,2,3]", "potential.kind=free".
/// Values are read as JSON literals, falling back to plain strings.
void apply_override(Scenario& s, const std::string& assignment);

/// Doubles with 17 significant digits.
std::string format_double(double v);

std::string metrics_csv(const std::vector<MetricRow>& rows);
std::string validity_csv(const std::vector<ValidityReport>& rows);
std::string profiles_csv(const std::vector<DensityProfile>& profiles);
std::string zone_table_csv(const std::vector<ZoneRow>& rows);

/// Resolved scenario, metric rows, validity rows and convergence slope.
std::string run_to_json(const ScenarioRun& run, int indent = 2);
std::string zone_table_json(const std::vector<ZoneRow>& rows, int indent = 2);

}  // namespace itb
