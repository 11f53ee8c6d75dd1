#include "itb/qprop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include "fft.hpp"
#include "itb/errors.hpp"

namespace itb {
namespace {

// Momentum of FFT bin k (natural FFT ordering).
double fft_momentum(std::size_t k, std::size_t n, double dp) {
  const auto kk = static_cast<std::ptrdiff_t>(k);
  const auto nn = static_cast<std::ptrdiff_t>(n);
  return static_cast<double>(kk < nn / 2 ? kk : kk - nn) * dp;
}

template <class PhaseOfP>
void apply_momentum_phase(std::vector<cplx>& work, detail::Fft& fft, double dp, PhaseOfP&& phase) {
  const std::size_t n = work.size();
  fft.forward(work);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    work[k] *= std::polar(inv_n, phase(fft_momentum(k, n, dp)));
  }
  fft.backward(work);
}

template <class PhaseOfX>
void apply_position_phase(std::vector<cplx>& work, const SpatialGrid& grid, PhaseOfX&& phase) {
  for (std::size_t j = 0; j < work.size(); ++j) work[j] *= std::polar(1.0, phase(grid.x(j)));
}

void check_box(const WaveFunction& psi, const char* who) {
  const double edge = boundary_density(psi);
  if (edge > kBoxEscapeThreshold) {
    std::ostringstream os;
    os << who << ": boundary density " << edge << " exceeds " << kBoxEscapeThreshold << " at t = "
       << psi.t();
    fail(ErrorKind::BoxEscape, os.str());
  }
}

}  // namespace

double boundary_density(const WaveFunction& psi) {
  const std::size_t n = psi.grid().n();
  const std::size_t strip = std::max<std::size_t>(1, n / 32);
  double s = 0.0;
  for (std::size_t j = 0; j < strip; ++j) s += psi.density(j) + psi.density(n - 1 - j);
  return s * psi.grid().dx();
}

double max_stable_dt(const SpatialGrid& grid, const Units& units) {
  const double p_max = kPi * units.hbar / grid.dx();
  return (kPi / 4.0) * 2.0 * units.mass * units.hbar / (p_max * p_max);
}

WaveFunction propagate(const WaveFunction& psi, const PotentialSpec& potential,
                       const PropagatorConfig& cfg, const Units& units) {
  units.validate();
  validate(potential);
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail(ErrorKind::InvalidArgument, "dt must be > 0");
  if (cfg.n_steps == 0) return psi;

  const SpatialGrid& grid = psi.grid();
  const double dt_limit = max_stable_dt(grid, units);
  if (cfg.dt >= dt_limit) {
    std::ostringstream os;
    os << "dt = " << cfg.dt << " puts more than pi/4 of kinetic phase per step at the grid edge"
       << " (limit " << dt_limit << ")";
    fail(ErrorKind::AliasRisk, os.str());
  }

  const std::size_t n = grid.n();
  const double hbar = units.hbar;
  const double dp = 2.0 * kPi * hbar / grid.length();

  std::vector<cplx> half_kick(n);
  std::vector<cplx> full_kick(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double v = potential_eval(potential, grid.x(j), units).v;
    half_kick[j] = std::polar(1.0, -0.5 * v * cfg.dt / hbar);
    full_kick[j] = std::polar(1.0, -v * cfg.dt / hbar);
  }
  std::vector<cplx> drift(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = fft_momentum(k, n, dp);
    drift[k] = std::polar(inv_n, -p * p * cfg.dt / (2.0 * units.mass * hbar));
  }

  std::vector<cplx> work(psi.amps().begin(), psi.amps().end());
  detail::Fft fft(n);
  for (std::size_t j = 0; j < n; ++j) work[j] *= half_kick[j];
  for (std::size_t step = 0; step < cfg.n_steps; ++step) {
    fft.forward(work);
    for (std::size_t k = 0; k < n; ++k) work[k] *= drift[k];
    fft.backward(work);
    // Adjacent half kicks of consecutive steps merge into one full kick.
    const auto& kick = (step + 1 == cfg.n_steps) ? half_kick : full_kick;
    for (std::size_t j = 0; j < n; ++j) work[j] *= kick[j];
  }

  WaveFunction out(grid, std::move(work), psi.t() + cfg.dt * static_cast<double>(cfg.n_steps));
  check_box(out, "propagate");
  return out;
}

cplx analytic_free_gaussian(double sigma, double x, double t, const Units& units) {
  const double s2 = sigma * sigma;
  const double a = units.hbar * t / units.mass;
  const cplx width(s2, a);
  const cplx exponent = -0.5 * x * x * cplx(s2, -a) / (s2 * s2 + a * a);
  return std::pow(s2 / kPi, 0.25) / std::sqrt(width) * std::exp(exponent);
}

WaveFunction analytic_propagate(const WaveFunction& psi, const PotentialSpec& potential, double t,
                                const Units& units) {
  units.validate();
  validate(potential);
  if (!std::isfinite(t)) fail(ErrorKind::InvalidArgument, "t must be finite");
  if (std::holds_alternative<PolynomialPotential>(potential)) {
    fail(ErrorKind::UnsupportedPotential, "no closed-form propagator for polynomial potentials");
  }

  const SpatialGrid& grid = psi.grid();
  const std::size_t n = grid.n();
  const double hbar = units.hbar;
  const double m = units.mass;
  const double dp = 2.0 * kPi * hbar / grid.length();
  std::vector<cplx> work(psi.amps().begin(), psi.amps().end());
  detail::Fft fft(n);

  if (std::holds_alternative<FreePotential>(potential)) {
    apply_momentum_phase(work, fft, dp, [&](double p) { return -p * p * t / (2.0 * m * hbar); });
  } else if (const auto* lin = std::get_if<LinearPotential>(&potential)) {
    // U(t) = exp(i F t x/hbar) exp(-i [p^2 t/2m + F p t^2/2m + F^2 t^3/6m]/hbar)
    const double f = lin->force;
    apply_momentum_phase(work, fft, dp, [&](double p) {
      return -(p * p * t / (2.0 * m) + f * p * t * t / (2.0 * m) + f * f * t * t * t / (6.0 * m)) /
             hbar;
    });
    apply_position_phase(work, grid, [&](double x) { return f * t * x / hbar; });
  } else {
    // Each chunk tau is exp(-i a x^2/hbar) exp(-i b p^2/hbar) exp(-i a x^2/hbar) with
    // a = m w tan(w tau/2)/2 and b = sin(w tau)/(2 m w); |w tau| <= pi/4 keeps the chirps mild.
    const double w = std::get<HarmonicPotential>(potential).omega;
    const auto chunks =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(w * t) / (kPi / 4.0))));
    const double tau = t / static_cast<double>(chunks);
    const double a = m * w * std::tan(0.5 * w * tau) / 2.0;
    const double b = std::sin(w * tau) / (2.0 * m * w);
    apply_position_phase(work, grid, [&](double x) { return -a * x * x / hbar; });
    for (std::size_t c = 0; c < chunks; ++c) {
      apply_momentum_phase(work, fft, dp, [&](double p) { return -b * p * p / hbar; });
      const double factor = (c + 1 == chunks) ? 1.0 : 2.0;
      apply_position_phase(work, grid, [&](double x) { return -factor * a * x * x / hbar; });
    }
  }

  WaveFunction out(grid, std::move(work), psi.t() + t);
  check_box(out, "analytic_propagate");
  return out;
}

}  // namespace itb
