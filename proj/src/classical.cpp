#include "itb/classical.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <variant>

#include "itb/errors.hpp"

namespace itb {
namespace {

void require_forward(double t_i, double t_f) {
  if (!(t_f > t_i) || !std::isfinite(t_f) || !std::isfinite(t_i)) {
    std::ostringstream os;
    os << "need t_f > t_i, got t_i = " << t_i << ", t_f = " << t_f;
    fail(ErrorKind::InvalidArgument, os.str());
  }
}

// Newton on the initial momentum without uniqueness certification.
ShootingResult newton_shoot(double x_i, double t_i, double x_f, double t_f,
                            const PotentialSpec& potential, double p_guess, const Units& units,
                            const ClassicalConfig& cfg) {
  const double tol = shooting_tolerance(x_f);
  double p = p_guess;
  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    TrajectoryResult traj = integrate({x_i, p, t_i}, t_f, potential, units, cfg);
    if (traj.near_caustic) {
      std::ostringstream os;
      os << "near caustic: dx_f/dp_i = " << traj.monodromy.m12 << " at p = " << p
         << " (t_f - t_i = " << t_f - t_i << ")";
      fail(ErrorKind::NearCaustic, os.str());
    }
    const double r = traj.end.x - x_f;
    if (std::abs(r) <= tol) return {p, std::move(traj), iter, std::abs(r)};
    p -= r / traj.monodromy.m12;
    if (!std::isfinite(p)) break;
  }
  std::ostringstream os;
  os << "shooting to x_f = " << x_f << " did not converge in " << cfg.max_iter << " iterations";
  fail(ErrorKind::NoConvergence, os.str());
}

}  // namespace

double default_time_step(const PotentialSpec& potential, double span) {
  if (std::holds_alternative<FreePotential>(potential) ||
      std::holds_alternative<LinearPotential>(potential)) {
    return span;
  }
  if (const auto* h = std::get_if<HarmonicPotential>(&potential)) return 1e-4 / h->omega;
  return 5e-5;
}

double shooting_tolerance(double x_f) noexcept { return 1e-10 * std::max(1.0, std::abs(x_f)); }

namespace {

TrajectoryResult verlet(const PhaseSpacePoint& start, double t_f, const PotentialSpec& potential,
                        const Units& units, const ClassicalConfig& cfg, double dt) {
  const double span = t_f - start.t;
  const double raw_steps = std::ceil(span / dt - 1e-9);
  if (!(raw_steps < 1e9)) fail(ErrorKind::InvalidArgument, "time step too small for the span");
  const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(raw_steps));
  const double h = span / static_cast<double>(steps);
  const double m = units.mass;

  double x = start.x;
  double p = start.p;
  Monodromy mono;
  double action = 0.0;
  PotentialValues pv = potential_eval(potential, x, units);

  const double e0 = p * p / (2.0 * m) + pv.v;
  double scale = std::max(std::abs(e0), p * p / (2.0 * m));
  double worst = 0.0;

  for (std::size_t k = 0; k < steps; ++k) {
    const double p_half = p - 0.5 * h * pv.dv;
    const double dp_half_dx = mono.m21 - 0.5 * h * pv.d2v * mono.m11;
    const double dp_half_dp = mono.m22 - 0.5 * h * pv.d2v * mono.m12;

    const double x_next = x + h * p_half / m;
    mono.m11 += h * dp_half_dx / m;
    mono.m12 += h * dp_half_dp / m;

    const PotentialValues next = potential_eval(potential, x_next, units);
    const double p_next = p_half - 0.5 * h * next.dv;
    mono.m21 = dp_half_dx - 0.5 * h * next.d2v * mono.m11;
    mono.m22 = dp_half_dp - 0.5 * h * next.d2v * mono.m12;

    // Discrete Verlet Lagrangian minus h^3 V'V'/(24 m): exact for a uniform force.
    action += h * (p_half * p_half / (2.0 * m) - 0.5 * (pv.v + next.v)) -
              h * h * h * pv.dv * next.dv / (24.0 * m);

    x = x_next;
    p = p_next;
    pv = next;
    const double kinetic = p * p / (2.0 * m);
    scale = std::max(scale, kinetic);
    worst = std::max(worst, std::abs(kinetic + pv.v - e0));
  }

  TrajectoryResult out;
  out.start = start;
  out.end = {x, p, t_f};
  out.action = action;
  out.monodromy = mono;
  out.steps = steps;
  out.energy_drift = scale > 0.0 ? worst / scale : 0.0;
  out.near_caustic = std::abs(mono.m12) < cfg.caustic_eps * span / m;
  return out;
}

}  // namespace

TrajectoryResult integrate(const PhaseSpacePoint& start, double t_f, const PotentialSpec& potential,
                           const Units& units, const ClassicalConfig& cfg) {
  require_forward(start.t, t_f);
  const double span = t_f - start.t;
  double dt = cfg.dt > 0.0 ? cfg.dt : default_time_step(potential, span);
  TrajectoryResult out = verlet(start, t_f, potential, units, cfg, dt);
  // A defaulted step refines itself; an explicit one is taken as given.
  for (int k = 0; cfg.dt <= 0.0 && k < 6 && out.energy_drift > cfg.energy_tol; ++k) {
    dt = std::min(dt, span) / 2.0;
    out = verlet(start, t_f, potential, units, cfg, dt);
  }
  if (out.energy_drift > cfg.energy_tol) {
    std::ostringstream os;
    os << "relative energy drift " << out.energy_drift << " with dt = " << span / static_cast<double>(out.steps)
       << " exceeds " << cfg.energy_tol;
    fail(ErrorKind::StepTooLarge, os.str());
  }
  return out;
}

ShootingResult shoot(double x_i, double t_i, double x_f, double t_f, const PotentialSpec& potential,
                     double p_guess, const Units& units, const ClassicalConfig& cfg,
                     const ShootOptions& opts) {
  require_forward(t_i, t_f);
  if (opts.certify_unique) {
    double lo = opts.p_lo;
    double hi = opts.p_hi;
    if (!(hi > lo)) {
      const double w = 4.0 * std::max(1.0, std::abs(p_guess));
      lo = p_guess - w;
      hi = p_guess + w;
    }
    const auto roots =
        multi_start_scan(x_i, t_i, x_f, t_f, potential, lo, hi, opts.n_starts, units, cfg);
    if (roots.size() > 1) {
      std::ostringstream os;
      os << roots.size() << " trajectories reach x_f = " << x_f << " at t_f = " << t_f << " (p_i =";
      for (double r : roots) os << ' ' << r;
      os << ')';
      fail(ErrorKind::MultipleRoots, os.str());
    }
    if (roots.size() == 1) p_guess = roots.front();
  }
  return newton_shoot(x_i, t_i, x_f, t_f, potential, p_guess, units, cfg);
}

std::vector<double> multi_start_scan(double x_i, double t_i, double x_f, double t_f,
                                     const PotentialSpec& potential, double p_lo, double p_hi,
                                     std::size_t n_starts, const Units& units,
                                     const ClassicalConfig& cfg) {
  require_forward(t_i, t_f);
  if (n_starts < 8) fail(ErrorKind::InvalidArgument, "multi_start_scan needs n_starts >= 8");
  if (!(p_hi > p_lo)) fail(ErrorKind::InvalidArgument, "multi_start_scan needs p_hi > p_lo");

  std::vector<double> found;
  for (std::size_t k = 0; k < n_starts; ++k) {
    const double guess =
        p_lo + (p_hi - p_lo) * static_cast<double>(k) / static_cast<double>(n_starts - 1);
    try {
      found.push_back(newton_shoot(x_i, t_i, x_f, t_f, potential, guess, units, cfg).p_i);
    } catch (const Error&) {
      // A start that diverges or meets a caustic contributes no root.
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<double> roots;
  for (double r : found) {
    if (roots.empty() || std::abs(r - roots.back()) > 1e-6 * std::max(1.0, std::abs(r))) {
      roots.push_back(r);
    }
  }
  return roots;
}

double van_vleck_amp(const TrajectoryResult& traj) {
  if (traj.near_caustic) {
    std::ostringstream os;
    os << "Van Vleck amplitude singular at caustic (dx_f/dp_i = " << traj.monodromy.m12 << ")";
    fail(ErrorKind::CausticSingular, os.str());
  }
  return 1.0 / std::sqrt(std::abs(traj.monodromy.m12));
}

MixedAction mixed_action(double x_f, double t_f, double p, double t_i, double x_ref,
                         const PotentialSpec& potential, const Units& units,
                         const ClassicalConfig& cfg) {
  require_forward(t_i, t_f);
  const double span = t_f - t_i;
  const double tol = shooting_tolerance(x_f);
  double x = x_f - p * span / units.mass;

  std::optional<TrajectoryResult> best;
  double best_residual = 0.0;
  std::size_t polish = 0;
  for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
    TrajectoryResult traj = integrate({x, p, t_i}, t_f, potential, units, cfg);
    const double r = traj.end.x - x_f;
    if (best && std::abs(r) >= best_residual) break;  // no further progress
    best = traj;
    best_residual = std::abs(r);
    if (best_residual <= tol && ++polish > 2) break;
    if (r == 0.0) break;
    const double m11 = traj.monodromy.m11;
    if (std::abs(m11) < 1e-12) {
      std::ostringstream os;
      os << "launch point undefined: dx_f/dx_i = " << m11 << " at p = " << p;
      fail(ErrorKind::NoConvergence, os.str());
    }
    x -= r / m11;
  }
  if (!best || best_residual > tol) {
    std::ostringstream os;
    os << "launch point for p = " << p << " reaching x_f = " << x_f << " not found";
    fail(ErrorKind::NoConvergence, os.str());
  }
  MixedAction out;
  out.launch_x = best->start.x;
  out.value = best->action + p * (out.launch_x - x_ref);
  out.trajectory = std::move(*best);
  return out;
}

DeterminantIdentity check_determinant_identity(double x_f, double t_f, double x_i, double t_i,
                                               const PotentialSpec& potential, const Units& units,
                                               const ClassicalConfig& cfg) {
  require_forward(t_i, t_f);
  const double span = t_f - t_i;
  const double m = units.mass;

  ShootingResult sr;
  try {
    sr = shoot(x_i, t_i, x_f, t_f, potential, m * (x_f - x_i) / span, units, cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NearCaustic) fail(ErrorKind::CausticSingular, e.detail());
    throw;
  }
  const Monodromy& mono = sr.trajectory.monodromy;

  DeterminantIdentity out;
  out.p_i = sr.p_i;
  out.van_vleck = van_vleck_amp(sr.trajectory);
  out.jacobian_factor = 1.0 / std::sqrt(std::abs(mono.m11));

  // Five-point second difference of the mixed action in p.
  const double scale =
      std::max({std::abs(sr.p_i), m * std::abs(x_f - x_i) / span, std::sqrt(m * units.hbar / span)});
  const double h = 1e-2 * scale;
  auto s_tilde = [&](double p) {
    return mixed_action(x_f, t_f, p, t_i, x_i, potential, units, cfg).value;
  };
  const double f0 = s_tilde(sr.p_i);
  const double fp1 = s_tilde(sr.p_i + h);
  const double fm1 = s_tilde(sr.p_i - h);
  const double fp2 = s_tilde(sr.p_i + 2.0 * h);
  const double fm2 = s_tilde(sr.p_i - 2.0 * h);
  const double hessian = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
  out.hessian_factor = 1.0 / std::sqrt(std::abs(hessian));

  out.deviation = std::abs(out.jacobian_factor * out.hessian_factor - out.van_vleck) / out.van_vleck;
  return out;
}

}  // namespace itb
