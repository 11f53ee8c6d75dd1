#pragma once

// Scenario definitions, metric tables and the convergence / transition-zone
// scans built on top of the propagation, classical and imaging modules.

#include <optional>
#include <string>
#include <vector>

#include "itb/classical.hpp"
#include "itb/core.hpp"
#include "itb/imaging.hpp"
#include "itb/potential.hpp"

namespace itb {

enum class Check { density_ratio, transport, determinant_identity, convergence, validity };

const char* to_string(Check check);
Check parse_check(const std::string& name);

struct InitialState {
  double sigma = 1.0;
  double x0 = 0.0;
  double p0 = 0.0;
};

struct Scenario {
  std::string name;
  PotentialSpec potential = FreePotential{};
  InitialState initial;
  Units units;
  /// Absent: sized from the classical fan at the last observation time.
  std::optional<SpatialGrid> grid;
  std::vector<double> schedule;
  std::vector<Check> checks;
  /// Launch point of the imaging trajectories.
  double x_i = 0.0;
  double t_i = 0.0;
  ClassicalConfig classical;
  /// Split-operator step for potentials without a closed-form propagator;
  /// <= 0 picks half the stability limit.
  double propagator_dt = 0.0;
  /// Relations the scenario provides evidence for, carried into the output.
  std::vector<std::string> evidences;

  bool has(Check c) const;
  /// Throws ScenarioInvalid.
  void validate() const;
};

struct MetricRow {
  std::string scenario;
  double t = 0.0;
  double validity_ratio = 0.0;                       // hbar (t - t_i) / (m sigma^2)
  double l2_density_error = 0.0;                     // ||rho_exact - rho_IT|| / ||rho_exact||
  double sup_density_error_at_classical_points = 0.0;
  double fidelity = 0.0;                             // |<Psi_exact|Psi_IT>| over the support
  double identity_deviation = 0.0;
  double transport_deviation = 0.0;
};

/// Column names of MetricRow in declaration order.
const std::vector<std::string>& metric_columns();

struct DensityProfile {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> rho_exact;
  std::vector<double> rho_it;
};

struct ScenarioRun {
  Scenario scenario;  // with the resolved grid
  std::vector<MetricRow> rows;
  std::vector<ValidityReport> validity;
  std::optional<double> convergence_slope;
  std::vector<DensityProfile> profiles;
};

/// Grid whose half-width is |x_f|max + 8 sigma_spread(t_last) and whose
/// spacing resolves both sigma and the largest classical momentum.
SpatialGrid auto_grid(const Scenario& s);

/// Runs every observation time of the scenario. Errors abort the run; the
/// message names the failing check and time.
ScenarioRun run_scenario(const Scenario& s);

struct ConvergenceResult {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<MetricRow> rows;
};

/// Least-squares slope of log(l2_density_error) against log(validity ratio).
/// Needs >= 5 times spanning >= one decade, each with f >= f_min.
ConvergenceResult convergence_scan(const Scenario& s, const std::vector<double>& times,
                                   double f_min = 3.0);

std::vector<double> geometric_times(double t_min, double t_max, std::size_t count);

/// Fitted slope and intercept of y = a + b x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ZoneRow {
  double mass = 0.0;
  double f = 0.0;
  double t_i = 0.0;  // m f^2 sigma^2 / hbar
  double x_i = 0.0;  // f sigma
};

std::vector<ZoneRow> transition_zone_table(const std::vector<double>& masses, double sigma,
                                           const std::vector<double>& fs, double hbar = 1.0);

std::vector<std::string> builtin_names();
/// Throws ScenarioInvalid for unknown names.
Scenario builtin_scenario(const std::string& name);

}  // namespace itb
