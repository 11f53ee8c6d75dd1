#include "itb/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "itb/errors.hpp"

namespace itb {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::ScenarioInvalid, what); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) bad("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad(where + "." + key + " must be a number");
  return v.get<double>();
}

json potential_json(const PotentialSpec& p) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FreePotential>) {
          return {{"kind", "free"}};
        } else if constexpr (std::is_same_v<T, LinearPotential>) {
          return {{"kind", "linear"}, {"force", v.force}};
        } else if constexpr (std::is_same_v<T, HarmonicPotential>) {
          return {{"kind", "harmonic"}, {"omega", v.omega}};
        } else {
          return {{"kind", "polynomial"}, {"coefficients", v.coefficients}};
        }
      },
      p);
}

PotentialSpec potential_from(const json& j) {
  if (j.is_string()) {
    try {
      return parse_potential(j.get<std::string>());
    } catch (const Error& e) {
      bad(e.detail());
    }
  }
  only_keys(j, "potential", {"kind", "force", "omega", "coefficients"});
  if (!j.contains("kind") || !j.at("kind").is_string()) bad("potential.kind must be a string");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "free") return FreePotential{};
  if (kind == "linear") return LinearPotential{number(j, "force", 0.0, "potential")};
  if (kind == "harmonic") return HarmonicPotential{number(j, "omega", 1.0, "potential")};
  if (kind == "polynomial") {
    PolynomialPotential poly;
    if (j.contains("coefficients")) {
      const json& c = j.at("coefficients");
      if (!c.is_array()) bad("potential.coefficients must be an array");
      for (const auto& v : c) {
        if (!v.is_number()) bad("potential.coefficients must hold numbers");
        poly.coefficients.push_back(v.get<double>());
      }
    }
    return poly;
  }
  bad("unknown potential kind '" + kind + "'");
}

json scenario_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["potential"] = potential_json(s.potential);
  j["initial"] = {{"sigma", s.initial.sigma}, {"x0", s.initial.x0}, {"p0", s.initial.p0}};
  j["units"] = {{"hbar", s.units.hbar}, {"mass", s.units.mass}};
  if (s.grid) {
    j["grid"] = {{"x_min", s.grid->x_min()}, {"x_max", s.grid->x_max()}, {"n", s.grid->n()}};
  } else {
    j["grid"] = nullptr;
  }
  j["schedule"] = s.schedule;
  json checks = json::array();
  for (Check c : s.checks) checks.push_back(to_string(c));
  j["checks"] = checks;
  j["launch"] = {{"x_i", s.x_i}, {"t_i", s.t_i}};
  j["classical"] = {{"dt", s.classical.dt},
                    {"caustic_eps", s.classical.caustic_eps},
                    {"max_iter", s.classical.max_iter},
                    {"energy_tol", s.classical.energy_tol}};
  j["propagator"] = {{"dt", s.propagator_dt}};
  j["evidences"] = s.evidences;
  return j;
}

Scenario scenario_from(const json& doc) {
  const json& j = doc.is_object() && doc.contains("scenario") ? doc.at("scenario") : doc;
  only_keys(j, "scenario", {"name", "potential", "initial", "units", "grid", "schedule", "checks",
                            "launch", "classical", "propagator", "evidences"});
  Scenario s;
  if (!j.contains("name") || !j.at("name").is_string()) bad("scenario.name must be a string");
  s.name = j.at("name").get<std::string>();
  if (j.contains("potential")) s.potential = potential_from(j.at("potential"));
  if (j.contains("initial")) {
    const json& i = j.at("initial");
    only_keys(i, "initial", {"sigma", "x0", "p0"});
    s.initial.sigma = number(i, "sigma", s.initial.sigma, "initial");
    s.initial.x0 = number(i, "x0", s.initial.x0, "initial");
    s.initial.p0 = number(i, "p0", s.initial.p0, "initial");
  }
  if (j.contains("units")) {
    const json& u = j.at("units");
    only_keys(u, "units", {"hbar", "mass"});
    s.units.hbar = number(u, "hbar", s.units.hbar, "units");
    s.units.mass = number(u, "mass", s.units.mass, "units");
  }
  if (j.contains("grid") && !j.at("grid").is_null()) {
    const json& g = j.at("grid");
    only_keys(g, "grid", {"x_min", "x_max", "n"});
    if (!g.contains("x_min") || !g.contains("x_max") || !g.contains("n")) bad("grid needs x_min, x_max and n");
    if (!g.at("n").is_number_unsigned()) bad("grid.n must be a positive integer");
    try {
      s.grid.emplace(number(g, "x_min", 0.0, "grid"), number(g, "x_max", 0.0, "grid"),
                     g.at("n").get<std::size_t>());
    } catch (const Error& e) {
      bad("grid: " + e.detail());
    }
  }
  if (j.contains("schedule")) {
    const json& t = j.at("schedule");
    if (!t.is_array()) bad("schedule must be an array");
    for (const auto& v : t) {
      if (!v.is_number()) bad("schedule must hold numbers");
      s.schedule.push_back(v.get<double>());
    }
  }
  if (j.contains("checks")) {
    const json& c = j.at("checks");
    if (!c.is_array()) bad("checks must be an array");
    for (const auto& v : c) {
      if (!v.is_string()) bad("checks must hold strings");
      s.checks.push_back(parse_check(v.get<std::string>()));
    }
  }
  if (j.contains("launch")) {
    const json& l = j.at("launch");
    only_keys(l, "launch", {"x_i", "t_i"});
    s.x_i = number(l, "x_i", s.x_i, "launch");
    s.t_i = number(l, "t_i", s.t_i, "launch");
  }
  if (j.contains("classical")) {
    const json& c = j.at("classical");
    only_keys(c, "classical", {"dt", "caustic_eps", "max_iter", "energy_tol"});
    s.classical.dt = number(c, "dt", s.classical.dt, "classical");
    s.classical.caustic_eps = number(c, "caustic_eps", s.classical.caustic_eps, "classical");
    s.classical.energy_tol = number(c, "energy_tol", s.classical.energy_tol, "classical");
    if (c.contains("max_iter")) {
      if (!c.at("max_iter").is_number_unsigned()) bad("classical.max_iter must be a positive integer");
      s.classical.max_iter = c.at("max_iter").get<std::size_t>();
    }
  }
  if (j.contains("propagator")) {
    const json& p = j.at("propagator");
    only_keys(p, "propagator", {"dt"});
    s.propagator_dt = number(p, "dt", s.propagator_dt, "propagator");
  }
  if (j.contains("evidences")) {
    const json& e = j.at("evidences");
    if (!e.is_array()) bad("evidences must be an array");
    for (const auto& v : e) {
      if (!v.is_string()) bad("evidences must hold strings");
      s.evidences.push_back(v.get<std::string>());
    }
  }
  s.validate();
  return s;
}

template <class Row, class F>
std::string csv(const std::vector<std::string>& header, const std::vector<Row>& rows, F&& cells) {
  std::ostringstream os;
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (const auto& r : rows) {
    const std::vector<std::string> c = cells(r);
    for (std::size_t k = 0; k < c.size(); ++k) os << (k ? "," : "") << c[k];
    os << '\n';
  }
  return os.str();
}

json validity_json(const ValidityReport& v) {
  return {{"sigma", v.sigma}, {"t", v.t}, {"ratio", v.ratio}, {"x_i", v.x_i}, {"f", v.f},
          {"mean_energy", v.mean_energy}, {"action_ratio", v.action_ratio},
          {"verdict", to_string(v.verdict)}};
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scenario_to_json(const Scenario& s, int indent) { return scenario_json(s).dump(indent); }

Scenario scenario_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("malformed scenario JSON: ") + e.what());
  }
  return scenario_from(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void apply_override(Scenario& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) bad("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  std::string pointer = "/";
  for (char c : key) pointer += c == '.' ? '/' : c;
  json j = scenario_json(s);
  if (j.contains("grid") && j["grid"].is_null() && key.rfind("grid.", 0) == 0) bad("set the whole grid object, e.g. grid={...}");
  try {
    j[json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    bad("override '" + assignment + "': " + e.what());
  }
  s = scenario_from(j);
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  return csv(metric_columns(), rows, [](const MetricRow& r) {
    return std::vector<std::string>{r.scenario,
                                    format_double(r.t),
                                    format_double(r.validity_ratio),
                                    format_double(r.l2_density_error),
                                    format_double(r.sup_density_error_at_classical_points),
                                    format_double(r.fidelity),
                                    format_double(r.identity_deviation),
                                    format_double(r.transport_deviation)};
  });
}

std::string validity_csv(const std::vector<ValidityReport>& rows) {
  return csv({"sigma", "t", "ratio", "x_i", "f", "mean_energy", "action_ratio", "verdict"}, rows,
             [](const ValidityReport& v) {
               return std::vector<std::string>{format_double(v.sigma), format_double(v.t),
                                               format_double(v.ratio), format_double(v.x_i),
                                               format_double(v.f), format_double(v.mean_energy),
                                               format_double(v.action_ratio), to_string(v.verdict)};
             });
}

std::string profiles_csv(const std::vector<DensityProfile>& profiles) {
  std::ostringstream os;
  os << "t,x,rho_exact,rho_it\n";
  for (const auto& p : profiles) {
    for (std::size_t k = 0; k < p.x.size(); ++k) {
      os << format_double(p.t) << ',' << format_double(p.x[k]) << ',' << format_double(p.rho_exact[k])
         << ',' << format_double(p.rho_it[k]) << '\n';
    }
  }
  return os.str();
}

std::string zone_table_csv(const std::vector<ZoneRow>& rows) {
  return csv({"mass", "f", "t_i", "x_i"}, rows, [](const ZoneRow& r) {
    return std::vector<std::string>{format_double(r.mass), format_double(r.f), format_double(r.t_i),
                                    format_double(r.x_i)};
  });
}

std::string run_to_json(const ScenarioRun& run, int indent) {
  json j;
  j["scenario"] = scenario_json(run.scenario);
  json rows = json::array();
  for (const auto& r : run.rows) {
    rows.push_back({{"scenario", r.scenario},
                    {"t", r.t},
                    {"validity_ratio", r.validity_ratio},
                    {"l2_density_error", r.l2_density_error},
                    {"sup_density_error_at_classical_points", r.sup_density_error_at_classical_points},
                    {"fidelity", r.fidelity},
                    {"identity_deviation", r.identity_deviation},
                    {"transport_deviation", r.transport_deviation}});
  }
  j["metrics"] = rows;
  json validity = json::array();
  for (const auto& v : run.validity) validity.push_back(validity_json(v));
  j["validity"] = validity;
  j["convergence_slope"] = run.convergence_slope ? json(*run.convergence_slope) : json(nullptr);
  return j.dump(indent);
}

std::string zone_table_json(const std::vector<ZoneRow>& rows, int indent) {
  json j = json::array();
  for (const auto& r : rows) j.push_back({{"mass", r.mass}, {"f", r.f}, {"t_i", r.t_i}, {"x_i", r.x_i}});
  return j.dump(indent);
}

}  // namespace itb
