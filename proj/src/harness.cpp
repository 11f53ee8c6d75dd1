#include "itb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "itb/errors.hpp"
#include "itb/fourier.hpp"
#include "itb/parallel.hpp"
#include "itb/qprop.hpp"

namespace itb {
namespace {

constexpr double kSupportFraction = 1e-12;
constexpr std::size_t kMaxProfilePoints = 2000;

[[noreturn]] void invalid(const std::string& scenario, const std::string& what) {
  fail(ErrorKind::ScenarioInvalid, "scenario '" + scenario + "': " + what);
}

// Runs body and re-raises library errors with the check and time prefixed.
template <class F>
auto named_check(const char* check, double t, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::ostringstream os;
    os << "check " << check << " at t = " << t << ": " << e.detail();
    throw Error(e.kind(), os.str());
  }
}

double momentum_width(const Scenario& s) { return s.units.hbar / s.initial.sigma; }

std::vector<double> momentum_offsets(const Scenario& s, std::initializer_list<double> multiples) {
  std::vector<double> ps;
  for (double k : multiples) ps.push_back(s.initial.p0 + k * momentum_width(s));
  return ps;
}

double classical_image(const Scenario& s, double p, double t) {
  return integrate({s.x_i, p, s.t_i}, t, s.potential, s.units, s.classical).end.x;
}

WaveFunction evolve(const WaveFunction& psi, double span, const Scenario& s) {
  if (span <= 0.0) return psi;
  if (is_quadratic(s.potential)) return analytic_propagate(psi, s.potential, span, s.units);
  const double limit = max_stable_dt(psi.grid(), s.units);
  const double target = s.propagator_dt > 0.0 ? s.propagator_dt : 0.5 * limit;
  PropagatorConfig cfg;
  cfg.n_steps = static_cast<std::size_t>(std::ceil(span / target - 1e-9));
  cfg.n_steps = std::max<std::size_t>(cfg.n_steps, 1);
  cfg.dt = span / static_cast<double>(cfg.n_steps);
  return propagate(psi, s.potential, cfg, s.units);
}

}  // namespace

const char* to_string(Check check) {
  switch (check) {
    case Check::density_ratio: return "density_ratio";
    case Check::transport: return "transport";
    case Check::determinant_identity: return "determinant_identity";
    case Check::convergence: return "convergence";
    case Check::validity: return "validity";
  }
  return "unknown";
}

Check parse_check(const std::string& name) {
  for (Check c : {Check::density_ratio, Check::transport, Check::determinant_identity,
                  Check::convergence, Check::validity}) {
    if (name == to_string(c)) return c;
  }
  fail(ErrorKind::ScenarioInvalid, "unknown check '" + name + "'");
}

bool Scenario::has(Check c) const { return std::find(checks.begin(), checks.end(), c) != checks.end(); }

void Scenario::validate() const {
  if (name.empty()) invalid(name, "name must not be empty");
  try {
    units.validate();
    itb::validate(potential);
  } catch (const Error& e) {
    invalid(name, e.detail());
  }
  if (!(initial.sigma > 0.0)) invalid(name, "initial.sigma must be > 0");
  if (!std::isfinite(initial.x0) || !std::isfinite(initial.p0)) invalid(name, "initial state not finite");
  if (schedule.empty()) invalid(name, "schedule must not be empty");
  if (!(t_i >= 0.0)) invalid(name, "launch time must be >= 0");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] >= 0.0) || !std::isfinite(schedule[k])) invalid(name, "schedule times must be finite and >= 0");
    if (k > 0 && !(schedule[k] > schedule[k - 1])) invalid(name, "schedule must be strictly increasing");
  }
  if (!(schedule.front() > t_i)) invalid(name, "observation times must follow the launch time");
  if (has(Check::convergence) && schedule.size() < 3) {
    invalid(name, "convergence check needs at least three observation times");
  }
}

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> cols = {
      "scenario",         "t",        "validity_ratio",     "l2_density_error",
      "sup_density_error_at_classical_points", "fidelity", "identity_deviation",
      "transport_deviation"};
  return cols;
}

SpatialGrid auto_grid(const Scenario& s) {
  s.validate();
  const double sigma = s.initial.sigma;
  const double sp = momentum_width(s);
  const double t_last = s.schedule.back();

  // Classical fan: launches from the packet centre and the imaging launch
  // point over p0 +/- 8 sigma_p, followed through the whole schedule.
  double x_extent = std::abs(s.initial.x0) + 8.0 * sigma;
  double p_extent = std::abs(s.initial.p0) + 8.0 * sp;
  constexpr std::size_t kFanMomenta = 33;
  constexpr std::size_t kSegments = 64;
  for (double x_start : {s.initial.x0, s.x_i}) {
    for (std::size_t k = 0; k < kFanMomenta; ++k) {
      const double p = s.initial.p0 + sp * (-8.0 + 16.0 * static_cast<double>(k) / (kFanMomenta - 1));
      PhaseSpacePoint pt{x_start, p, 0.0};
      for (std::size_t seg = 1; seg <= kSegments; ++seg) {
        const double t = t_last * static_cast<double>(seg) / kSegments;
        pt = integrate(pt, t, s.potential, s.units, s.classical).end;
        x_extent = std::max(x_extent, std::abs(pt.x));
        p_extent = std::max(p_extent, std::abs(pt.p));
      }
    }
  }
  const double spread =
      std::sqrt(sigma * sigma + std::pow(s.units.hbar * t_last / (s.units.mass * sigma), 2));
  const double half_width = x_extent + 8.0 * spread;
  const double dx = std::min(sigma / 5.0, kPi * s.units.hbar / (1.5 * p_extent));
  const auto n = next_power_of_two(
      std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(2.0 * half_width / dx))));
  return SpatialGrid(-half_width, half_width, n);
}

namespace {

ScenarioRun run_checks(const Scenario& input) {
  ScenarioRun run;
  run.scenario = input;
  const Scenario& s = run.scenario;
  if (!run.scenario.grid) run.scenario.grid = auto_grid(input);
  const SpatialGrid grid = *s.grid;
  const double hbar = s.units.hbar;

  const WaveFunction psi0 =
      named_check("initial_state", 0.0, [&] { return gaussian_packet(grid, s.initial.sigma, s.initial.x0, s.initial.p0, s.units); });
  const WaveFunction psi_launch =
      named_check("exact_propagation", s.t_i, [&] { return evolve(psi0, s.t_i, s); });
  const MomentumWaveFunction phi = to_momentum(psi_launch, hbar);

  ItOptions node_opts;
  node_opts.certify_unique = false;
  node_opts.classical = s.classical;
  ItOptions certified = node_opts;
  certified.certify_unique = true;

  WaveFunction current = psi0;
  for (double t : s.schedule) {
    current = named_check("exact_propagation", t, [&] {
      // Closed-form kernels restart from t = 0; split-operator runs continue.
      return is_quadratic(s.potential) ? evolve(psi0, t, s) : evolve(current, t - current.t(), s);
    });

    MetricRow row;
    row.scenario = s.name;
    row.t = t;
    row.validity_ratio = hbar * (t - s.t_i) / (s.units.mass * s.initial.sigma * s.initial.sigma);

    // Single-trajectory certification at the core of the momentum distribution.
    named_check("it_wavefunction", t, [&] {
      for (double p : momentum_offsets(s, {-2.0, -1.0, 0.0, 1.0, 2.0})) {
        const TrajectoryResult traj = integrate({s.x_i, p, s.t_i}, t, s.potential, s.units, s.classical);
        van_vleck_amp(traj);
        it_wavefunction(traj.end.x, t, phi, s.potential, s.x_i, s.t_i, s.units, certified);
      }
      return 0;
    });

    double rho_max = 0.0;
    for (std::size_t j = 0; j < grid.n(); ++j) rho_max = std::max(rho_max, current.density(j));
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < grid.n(); ++j) {
      if (current.density(j) > kSupportFraction * rho_max) support.push_back(j);
    }
    std::vector<cplx> it_amps(support.size());
    named_check("it_wavefunction", t, [&] {
      parallel_for(support.size(), [&](std::size_t k) {
        it_amps[k] = it_wavefunction(grid.x(support[k]), t, phi, s.potential, s.x_i, s.t_i, s.units,
                                     node_opts)
                         .amp;
      });
      return 0;
    });

    double diff2 = 0.0;
    double ref2 = 0.0;
    cplx overlap = 0.0;
    double norm_e = 0.0;
    double norm_it = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const cplx e = current.amps()[support[k]];
      const double rho_e = std::norm(e);
      const double rho_it = std::norm(it_amps[k]);
      diff2 += (rho_e - rho_it) * (rho_e - rho_it);
      ref2 += rho_e * rho_e;
      overlap += std::conj(e) * it_amps[k];
      norm_e += rho_e;
      norm_it += rho_it;
    }
    row.l2_density_error = std::sqrt(diff2 / ref2);
    row.fidelity = std::abs(overlap) / std::sqrt(norm_e * norm_it);

    if (s.has(Check::density_ratio)) {
      row.sup_density_error_at_classical_points = named_check("density_ratio", t, [&] {
        double worst = 0.0;
        for (double p : momentum_offsets(s, {-1.0, -0.5, 0.0, 0.5, 1.0})) {
          const double x_f = classical_image(s, p, t);
          const DensityRatio dr =
              density_ratio_check(x_f, t, current, phi, s.potential, s.x_i, s.t_i, s.units, node_opts);
          worst = std::max(worst, dr.deviation);
        }
        return worst;
      });
    }

    if (s.has(Check::determinant_identity)) {
      row.identity_deviation = named_check("determinant_identity", t, [&] {
        const double x_f = classical_image(s, s.initial.p0, t);
        return check_determinant_identity(x_f, t, s.x_i, s.t_i, s.potential, s.units, s.classical)
            .deviation;
      });
    }

    if (s.has(Check::transport)) {
      row.transport_deviation = named_check("transport", t, [&] {
        const auto bins = probability_transport(phi, s.potential, s.x_i, s.t_i, t,
                                                momentum_offsets(s, {-2.0, -1.0, 0.0, 1.0, 2.0}),
                                                s.units, certified);
        double worst = 0.0;
        for (const auto& b : bins) {
          worst = std::max(worst, std::abs(exact_probability(current, b.x_a, b.x_b) - b.momentum_probability));
        }
        return worst;
      });
    }

    if (s.has(Check::validity)) {
      run.validity.push_back(validity_report(s.initial.sigma, t - s.t_i, s.units));
    }

    DensityProfile profile;
    profile.t = t;
    const std::size_t stride = std::max<std::size_t>(1, support.size() / kMaxProfilePoints);
    for (std::size_t k = 0; k < support.size(); k += stride) {
      profile.x.push_back(grid.x(support[k]));
      profile.rho_exact.push_back(current.density(support[k]));
      profile.rho_it.push_back(std::norm(it_amps[k]));
    }
    run.profiles.push_back(std::move(profile));
    run.rows.push_back(row);
  }

  if (s.has(Check::convergence)) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& r : run.rows) {
      lx.push_back(std::log(r.validity_ratio));
      ly.push_back(std::log(r.l2_density_error));
    }
    run.convergence_slope = fit_line(lx, ly).first;
  }
  return run;
}

}  // namespace

ScenarioRun run_scenario(const Scenario& input) {
  input.validate();
  try {
    return run_checks(input);
  } catch (const Error& e) {
    throw Error(e.kind(), "scenario '" + input.name + "', " + e.detail());
  }
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::InvalidArgument, "fit_line needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

std::vector<double> geometric_times(double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0.0) || !(t_max > t_min) || count < 2) {
    fail(ErrorKind::InvalidArgument, "geometric_times needs 0 < t_min < t_max and count >= 2");
  }
  std::vector<double> ts(count);
  for (std::size_t k = 0; k < count; ++k) {
    ts[k] = t_min * std::pow(t_max / t_min, static_cast<double>(k) / static_cast<double>(count - 1));
  }
  ts.back() = t_max;
  return ts;
}

ConvergenceResult convergence_scan(const Scenario& s, const std::vector<double>& times, double f_min) {
  if (times.size() < 5) invalid(s.name, "convergence scan needs at least 5 times");
  Scenario scan = s;
  scan.schedule = times;
  scan.checks.clear();
  scan.validate();
  const double first = times.front() - s.t_i;
  const double last = times.back() - s.t_i;
  if (last < 10.0 * first) invalid(s.name, "convergence scan must span at least one decade");
  for (double t : times) {
    const ValidityReport v = validity_report(s.initial.sigma, t - s.t_i, s.units, f_min);
    if (v.verdict != ZoneVerdict::inside_zone) {
      std::ostringstream os;
      os << "t = " << t << " has f = " << v.f << " below the zone threshold " << f_min;
      invalid(s.name, os.str());
    }
  }
  ConvergenceResult out;
  out.rows = run_scenario(scan).rows;
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& r : out.rows) {
    lx.push_back(std::log(r.validity_ratio));
    ly.push_back(std::log(r.l2_density_error));
  }
  std::tie(out.slope, out.intercept) = fit_line(lx, ly);
  return out;
}

std::vector<ZoneRow> transition_zone_table(const std::vector<double>& masses, double sigma,
                                           const std::vector<double>& fs, double hbar) {
  if (!(sigma > 0.0) || !(hbar > 0.0)) fail(ErrorKind::InvalidArgument, "sigma and hbar must be > 0");
  std::vector<ZoneRow> rows;
  for (double m : masses) {
    if (!(m > 0.0)) fail(ErrorKind::InvalidArgument, "masses must be > 0");
    for (double f : fs) {
      if (!(f > 0.0)) fail(ErrorKind::InvalidArgument, "f must be > 0");
      rows.push_back({m, f, m * f * f * sigma * sigma / hbar, f * sigma});
    }
  }
  return rows;
}

std::vector<std::string> builtin_names() {
  return {"free-gaussian", "linear-field", "harmonic", "harmonic-caustic", "anharmonic",
          "hydrogen-electron"};
}

Scenario builtin_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "free-gaussian") {
    s.potential = FreePotential{};
    s.schedule = {1.0, 3.0, 10.0, 30.0, 100.0};
    s.checks = {Check::density_ratio, Check::transport, Check::determinant_identity,
                Check::convergence, Check::validity};
    s.evidences = {"free-particle imaging form", "exact free Gaussian spreading",
                   "trajectory density dp_i/dx_f = m/t", "probability transport",
                   "Van Vleck determinant identity"};
  } else if (name == "linear-field") {
    s.potential = LinearPotential{0.5};
    s.schedule = {3.0, 10.0, 30.0};
    s.checks = {Check::density_ratio, Check::transport, Check::determinant_identity};
    s.evidences = {"imaging wavefunction in a uniform field", "trajectory density",
                   "probability transport", "Van Vleck determinant identity"};
  } else if (name == "harmonic") {
    s.potential = HarmonicPotential{0.05};
    s.schedule = {5.0, 10.0, 20.0, 30.0};
    s.checks = {Check::density_ratio, Check::transport, Check::determinant_identity};
    s.evidences = {"imaging wavefunction under a confining force", "trajectory density",
                   "probability transport", "Van Vleck determinant identity"};
  } else if (name == "harmonic-caustic") {
    s.potential = HarmonicPotential{1.0};
    s.schedule = {1.0, kPi};
    s.checks = {Check::density_ratio};
    s.evidences = {"caustic detection where dx_f/dp_i vanishes"};
  } else if (name == "anharmonic") {
    s.potential = PolynomialPotential{{0.0, 0.0, 0.0, 0.0, 1e-4}};
    s.initial.p0 = 2.0;
    s.schedule = {1.0, 2.0, 3.0};
    s.checks = {Check::density_ratio, Check::transport};
    s.evidences = {"imaging wavefunction for a non-quadratic potential", "trajectory density",
                   "probability transport"};
  } else if (name == "hydrogen-electron") {
    s.potential = FreePotential{};
    s.schedule = {1e4};
    s.checks = {Check::density_ratio, Check::validity};
    s.evidences = {"transition zone for an electron released from an atom: x_i = 100, t_i = 1e4 a.u."};
  } else {
    fail(ErrorKind::ScenarioInvalid, "unknown builtin scenario '" + name + "'");
  }
  return s;
}

}  // namespace itb
