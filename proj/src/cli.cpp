#include "itb/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "itb/errors.hpp"
#include "itb/fourier.hpp"
#include "itb/harness.hpp"
#include "itb/parallel.hpp"
#include "itb/qprop.hpp"
#include "itb/scenario_io.hpp"

namespace itb {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string output_dir = ".";
  std::string format = "csv";
};

struct Sources {
  std::vector<std::string> builtins;
  std::vector<std::string> paths;
  std::vector<std::string> overrides;
  bool all = false;
};

void write_file(const Common& c, const std::string& name, const std::string& content) {
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorKind::InvalidArgument, "failed writing " + path.string());
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--output-dir,-o", c.output_dir, "directory for every file the command writes");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_sources(CLI::App* cmd, Sources& s) {
  cmd->add_option("--builtin,-b", s.builtins, "builtin scenario name (repeatable)");
  cmd->add_option("--scenario,-s", s.paths, "scenario JSON file (repeatable)");
  cmd->add_option("--set", s.overrides, "dotted.key=value override applied to every scenario");
}

std::vector<Scenario> resolve(const Sources& src) {
  std::vector<Scenario> out;
  if (src.all) {
    for (const auto& n : builtin_names()) out.push_back(builtin_scenario(n));
  }
  for (const auto& n : src.builtins) out.push_back(builtin_scenario(n));
  for (const auto& p : src.paths) out.push_back(load_scenario(p));
  if (out.empty()) fail(ErrorKind::ScenarioInvalid, "no scenario given (use --builtin or --scenario)");
  for (auto& s : out) {
    for (const auto& o : src.overrides) apply_override(s, o);
    s.validate();
  }
  return out;
}

struct InlineState {
  std::string potential = "free";
  double sigma = 1.0;
  double x0 = 0.0;
  double p0 = 0.0;
  double mass = 1.0;
  double hbar = 1.0;
  double x_i = 0.0;
  double t_i = 0.0;
  double dt = 0.0;
};

void add_state(CLI::App* cmd, InlineState& st) {
  cmd->add_option("--potential", st.potential, "free | linear:force=F | harmonic:omega=W | polynomial:c=c0,c1,...");
  cmd->add_option("--sigma", st.sigma, "initial Gaussian width");
  cmd->add_option("--x0", st.x0, "initial packet centre");
  cmd->add_option("--p0", st.p0, "initial mean momentum");
  cmd->add_option("--mass", st.mass, "particle mass");
  cmd->add_option("--hbar", st.hbar, "Planck constant");
  cmd->add_option("--x-i", st.x_i, "launch point of the classical trajectories");
  cmd->add_option("--t-i", st.t_i, "launch time");
  cmd->add_option("--dt", st.dt, "classical step (0 = automatic)");
}

Scenario inline_scenario(const InlineState& st, double t) {
  Scenario s;
  s.name = "inline";
  try {
    s.potential = parse_potential(st.potential);
  } catch (const Error& e) {
    fail(ErrorKind::ScenarioInvalid, e.detail());
  }
  s.initial = {st.sigma, st.x0, st.p0};
  s.units = {st.hbar, st.mass};
  s.x_i = st.x_i;
  s.t_i = st.t_i;
  s.classical.dt = st.dt;
  s.schedule = {t};
  s.validate();
  return s;
}

int cmd_run(const Sources& src, const Common& c, bool profiles, std::ostream& out) {
  const std::vector<Scenario> scenarios = resolve(src);
  std::vector<ScenarioRun> runs(scenarios.size());
  parallel_for(scenarios.size(), [&](std::size_t k) { runs[k] = run_scenario(scenarios[k]); });

  std::vector<MetricRow> all_rows;
  for (const auto& r : runs) all_rows.insert(all_rows.end(), r.rows.begin(), r.rows.end());
  if (c.format == "csv") {
    write_file(c, "metrics.csv", metrics_csv(all_rows));
    for (const auto& r : runs) {
      if (!r.validity.empty()) write_file(c, r.scenario.name + ".validity.csv", validity_csv(r.validity));
      if (profiles) write_file(c, r.scenario.name + ".profiles.csv", profiles_csv(r.profiles));
    }
  } else {
    if (runs.size() == 1) {
      write_file(c, "metrics.json", run_to_json(runs.front()));
    } else {
      json docs = json::array();
      for (const auto& r : runs) docs.push_back(json::parse(run_to_json(r)));
      write_file(c, "metrics.json", docs.dump(2));
    }
    for (const auto& r : runs) {
      write_file(c, r.scenario.name + ".json", run_to_json(r));
      if (profiles) write_file(c, r.scenario.name + ".profiles.csv", profiles_csv(r.profiles));
    }
  }
  for (const auto& r : runs) {
    out << r.scenario.name << ": " << r.rows.size() << " rows";
    if (r.convergence_slope) out << ", convergence slope " << format_double(*r.convergence_slope);
    out << '\n';
  }
  return 0;
}

int cmd_it_eval(const InlineState& st, double t, std::vector<double> xs, const Common& c,
                std::ostream& out) {
  const Scenario s = inline_scenario(st, t);
  if (xs.empty()) {
    xs.push_back(integrate({s.x_i, s.initial.p0, s.t_i}, t, s.potential, s.units, s.classical).end.x);
  }
  const SpatialGrid grid = auto_grid(s);
  const WaveFunction psi0 = gaussian_packet(grid, s.initial.sigma, s.initial.x0, s.initial.p0, s.units);
  WaveFunction launch = psi0;
  if (s.t_i > 0.0) {
    if (!is_quadratic(s.potential)) {
      fail(ErrorKind::UnsupportedPotential, "it-eval with t_i > 0 needs a quadratic potential");
    }
    launch = analytic_propagate(psi0, s.potential, s.t_i, s.units);
  }
  const MomentumWaveFunction phi = to_momentum(launch, s.units.hbar);
  ItOptions opts;
  opts.classical = s.classical;

  std::vector<ItSample> samples;
  for (double x : xs) samples.push_back(it_wavefunction(x, t, phi, s.potential, s.x_i, s.t_i, s.units, opts));

  if (c.format == "csv") {
    std::ostringstream os;
    os << "x_f,t_f,p_i,prefactor,phase,re,im,density\n";
    for (const auto& v : samples) {
      os << format_double(v.x_f) << ',' << format_double(v.t_f) << ',' << format_double(v.p_i) << ','
         << format_double(v.prefactor) << ',' << format_double(v.phase) << ','
         << format_double(v.amp.real()) << ',' << format_double(v.amp.imag()) << ','
         << format_double(std::norm(v.amp)) << '\n';
    }
    write_file(c, "it_eval.csv", os.str());
  } else {
    json arr = json::array();
    for (const auto& v : samples) {
      arr.push_back({{"x_f", v.x_f}, {"t_f", v.t_f}, {"p_i", v.p_i}, {"prefactor", v.prefactor},
                     {"phase", v.phase}, {"re", v.amp.real()}, {"im", v.amp.imag()},
                     {"density", std::norm(v.amp)}});
    }
    write_file(c, "it_eval.json", arr.dump(2));
  }
  out << samples.size() << " samples\n";
  return 0;
}

int cmd_trajectory(const InlineState& st, double t_f, std::optional<double> p_i,
                   std::optional<double> x_f, const Common& c, std::ostream& out) {
  const Scenario s = inline_scenario(st, t_f);
  TrajectoryResult traj;
  if (x_f) {
    const double guess = p_i.value_or(s.units.mass * (*x_f - s.x_i) / (t_f - s.t_i));
    traj = shoot(s.x_i, s.t_i, *x_f, t_f, s.potential, guess, s.units, s.classical).trajectory;
  } else {
    traj = integrate({s.x_i, p_i.value_or(s.initial.p0), s.t_i}, t_f, s.potential, s.units, s.classical);
  }
  const Monodromy& m = traj.monodromy;
  const std::vector<std::pair<std::string, double>> fields = {
      {"x_i", traj.start.x}, {"p_i", traj.start.p}, {"t_i", traj.start.t}, {"x_f", traj.end.x},
      {"p_f", traj.end.p},   {"t_f", traj.end.t},   {"action", traj.action}, {"m11", m.m11},
      {"m12", m.m12},        {"m21", m.m21},        {"m22", m.m22},        {"det", m.det()},
      {"energy_drift", traj.energy_drift}, {"steps", static_cast<double>(traj.steps)},
      {"near_caustic", traj.near_caustic ? 1.0 : 0.0}};
  if (c.format == "csv") {
    std::ostringstream head, row;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      head << (k ? "," : "") << fields[k].first;
      row << (k ? "," : "") << format_double(fields[k].second);
    }
    write_file(c, "trajectory.csv", head.str() + "\n" + row.str() + "\n");
  } else {
    json j;
    for (const auto& [k, v] : fields) j[k] = v;
    write_file(c, "trajectory.json", j.dump(2));
  }
  out << "x_f = " << format_double(traj.end.x) << ", p_f = " << format_double(traj.end.p) << '\n';
  return 0;
}

int cmd_scan(const Sources& src, double t_min, double t_max, std::size_t points, double f_min,
             const Common& c, std::ostream& out) {
  const std::vector<Scenario> scenarios = resolve(src);
  if (scenarios.size() != 1) fail(ErrorKind::ScenarioInvalid, "scan takes exactly one scenario");
  const Scenario& s = scenarios.front();
  std::vector<double> times;
  try {
    times = geometric_times(t_min, t_max, points);
  } catch (const Error& e) {
    fail(ErrorKind::ScenarioInvalid, e.detail());
  }
  const ConvergenceResult r = convergence_scan(s, times, f_min);
  if (c.format == "csv") {
    write_file(c, "convergence.csv", metrics_csv(r.rows));
    write_file(c, "convergence_fit.csv",
               "scenario,slope,intercept\n" + s.name + "," + format_double(r.slope) + "," +
                   format_double(r.intercept) + "\n");
  } else {
    ScenarioRun run;
    run.scenario = s;
    run.rows = r.rows;
    json j = json::parse(run_to_json(run));
    j["convergence_slope"] = r.slope;
    j["convergence_intercept"] = r.intercept;
    write_file(c, "convergence.json", j.dump(2));
  }
  out << "slope " << format_double(r.slope) << '\n';
  return 0;
}

int cmd_zone_table(const std::vector<double>& masses, double sigma, const std::vector<double>& fs,
                   double hbar, const Common& c, std::ostream& out) {
  std::vector<ZoneRow> rows;
  try {
    rows = transition_zone_table(masses, sigma, fs, hbar);
  } catch (const Error& e) {
    fail(ErrorKind::ScenarioInvalid, e.detail());
  }
  if (c.format == "csv") {
    write_file(c, "zone_table.csv", zone_table_csv(rows));
  } else {
    write_file(c, "zone_table.json", zone_table_json(rows));
  }
  for (const auto& r : rows) {
    out << "m = " << format_double(r.mass) << "  f = " << format_double(r.f)
        << "  t_i = " << format_double(r.t_i) << "  x_i = " << format_double(r.x_i) << '\n';
  }
  return 0;
}

int cmd_list(std::ostream& out) {
  for (const auto& n : builtin_names()) {
    const Scenario s = builtin_scenario(n);
    out << n << "  [" << describe(s.potential) << "]";
    for (const auto& e : s.evidences) out << "\n    evidence: " << e;
    out << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"imaging-theorem bench: exact propagation versus single-trajectory imaging"};
  app.require_subcommand(1, 1);

  Common common;
  Sources sources;
  InlineState state;
  bool profiles = false;
  double t = 0.0;
  std::vector<double> xs;
  std::optional<double> p_i;
  std::optional<double> x_f;
  double t_min = 10.0, t_max = 100.0, f_min = 3.0;
  std::size_t points = 6;
  std::vector<double> masses;
  std::vector<double> fs;
  double sigma = 1.0;
  double hbar = 1.0;

  auto* run = app.add_subcommand("run", "run builtin or file scenarios and write metric tables");
  add_common(run, common);
  add_sources(run, sources);
  run->add_flag("--all", sources.all, "run every builtin scenario");
  run->add_flag("--profiles", profiles, "also write density profiles (x, rho_exact, rho_it)");

  auto* it_eval = app.add_subcommand("it-eval", "evaluate the imaging wavefunction at detector points");
  add_common(it_eval, common);
  add_state(it_eval, state);
  it_eval->add_option("--t", t, "observation time")->required();
  it_eval->add_option("--x", xs, "detector positions (default: image of p0)");

  auto* traj = app.add_subcommand("trajectory", "integrate or shoot one classical trajectory");
  add_common(traj, common);
  add_state(traj, state);
  traj->add_option("--t", t, "final time")->required();
  traj->add_option("--p-i", p_i, "initial momentum (integrate; default p0)");
  traj->add_option("--x-f", x_f, "target position (shoot)");

  auto* scan = app.add_subcommand("scan", "convergence scan over geometric observation times");
  add_common(scan, common);
  add_sources(scan, sources);
  scan->add_option("--t-min", t_min, "first time");
  scan->add_option("--t-max", t_max, "last time");
  scan->add_option("--points", points, "number of times (>= 5)");
  scan->add_option("--f-min", f_min, "zone threshold on f = sqrt(hbar t/m)/sigma");

  auto* zone = app.add_subcommand("zone-table", "launch distance and time of the transition zone");
  add_common(zone, common);
  zone->add_option("--mass", masses, "particle masses (repeatable)")->required();
  zone->add_option("--f", fs, "zone factors (repeatable)")->required();
  zone->add_option("--sigma", sigma, "initial width");
  zone->add_option("--hbar", hbar, "Planck constant");

  auto* list = app.add_subcommand("list-builtins", "list builtin scenarios");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }

  const CLI::App* cmd = app.get_subcommands().front();
  try {
    if (cmd == run) return cmd_run(sources, common, profiles, out);
    if (cmd == it_eval) return cmd_it_eval(state, t, xs, common, out);
    if (cmd == traj) return cmd_trajectory(state, t, p_i, x_f, common, out);
    if (cmd == scan) return cmd_scan(sources, t_min, t_max, points, f_min, common, out);
    if (cmd == zone) return cmd_zone_table(masses, sigma, fs, hbar, common, out);
    if (cmd == list) return cmd_list(out);
  } catch (const Error& e) {
    err << cmd->get_name() << ": " << e.what() << '\n';
    return is_numerical(e.kind()) ? 3 : 2;
  } catch (const std::exception& e) {
    err << cmd->get_name() << ": " << e.what() << '\n';
    return 2;
  }
  return 1;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace itb
