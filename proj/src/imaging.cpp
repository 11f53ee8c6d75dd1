#include "itb/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <tuple>

#include "itb/errors.hpp"
#include "itb/parallel.hpp"

namespace itb {
namespace {

// 4-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGaussNodes = {-0.8611363115940526, -0.3399810435848563,
                                               0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights = {0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};

// Momentum interval where |Psi~|^2 exceeds 1e-12 of its peak, padded by one cell.
std::pair<double, double> momentum_support(const MomentumWaveFunction& phi) {
  const auto amps = phi.amps();
  double peak = 0.0;
  for (const cplx& a : amps) peak = std::max(peak, std::norm(a));
  std::size_t lo = amps.size();
  std::size_t hi = 0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    if (std::norm(amps[k]) > 1e-12 * peak) {
      lo = std::min(lo, k);
      hi = k;
    }
  }
  if (lo > hi) return {phi.grid().p_min(), phi.grid().p_max()};
  lo = lo > 0 ? lo - 1 : lo;
  hi = std::min(hi + 1, amps.size() - 1);
  return {phi.grid().p(lo), phi.grid().p(hi)};
}

ShootingResult solve_trajectory(double x_f, double t_f, const MomentumWaveFunction& phi,
                                const PotentialSpec& potential, double x_i, double t_i,
                                const Units& units, const ItOptions& opts) {
  if (!(t_f > t_i)) fail(ErrorKind::InvalidArgument, "imaging needs t_f > t_i");
  ShootOptions so;
  so.certify_unique = opts.certify_unique;
  if (opts.certify_unique) std::tie(so.p_lo, so.p_hi) = momentum_support(phi);
  so.n_starts = opts.n_starts;
  const double p_guess = units.mass * (x_f - x_i) / (t_f - t_i);
  ShootingResult sr;
  try {
    sr = shoot(x_i, t_i, x_f, t_f, potential, p_guess, units, opts.classical, so);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NearCaustic) {
      fail(ErrorKind::CausticSingular, "caustic at x_f = " + std::to_string(x_f) + ", t_f = " +
                                           std::to_string(t_f) + ": " + e.detail());
    }
    throw;
  }
  if (!phi.contains(sr.p_i)) {
    std::ostringstream os;
    os << "classical momentum p_i = " << sr.p_i << " for x_f = " << x_f
       << " lies outside the momentum grid [" << phi.grid().p_min() << ", " << phi.grid().p_max()
       << "]";
    fail(ErrorKind::MomentumOutOfRange, os.str());
  }
  return sr;
}

ItSample sample_from(const ShootingResult& sr, double x_f, double t_f,
                     const MomentumWaveFunction& phi, const Units& units) {
  ItSample s;
  s.x_f = x_f;
  s.t_f = t_f;
  s.p_i = sr.p_i;
  s.prefactor = van_vleck_amp(sr.trajectory);
  s.phase = sr.trajectory.action / units.hbar - kPi / 4.0;
  s.amp = s.prefactor * std::polar(1.0, s.phase) * phi.at(sr.p_i);
  return s;
}

template <class F>
double gauss_panel(double a, double b, F&& f) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) s += kGaussWeights[k] * f(mid + half * kGaussNodes[k]);
  return s * half;
}

}  // namespace

ItSample it_wavefunction(double x_f, double t_f, const MomentumWaveFunction& phi,
                         const PotentialSpec& potential, double x_i, double t_i,
                         const Units& units, const ItOptions& opts) {
  const ShootingResult sr = solve_trajectory(x_f, t_f, phi, potential, x_i, t_i, units, opts);
  return sample_from(sr, x_f, t_f, phi, units);
}

cplx free_it(double x, double t, const MomentumWaveFunction& phi, const Units& units) {
  if (!(t > 0.0)) fail(ErrorKind::InvalidArgument, "free_it needs t > 0");
  const double m = units.mass;
  const double p = m * x / t;
  const cplx root = std::sqrt(m / t) * std::polar(1.0, -kPi / 4.0);
  return root * std::polar(1.0, p * p * t / (2.0 * m * units.hbar)) * phi.at(p);
}

DensityRatio density_ratio_check(double x_f, double t_f, const WaveFunction& psi_exact,
                                 const MomentumWaveFunction& phi, const PotentialSpec& potential,
                                 double x_i, double t_i, const Units& units,
                                 const ItOptions& opts) {
  const std::size_t j = psi_exact.grid().nearest_index(x_f);
  DensityRatio out;
  out.x_f = psi_exact.grid().x(j);
  const ShootingResult sr = solve_trajectory(out.x_f, t_f, phi, potential, x_i, t_i, units, opts);
  if (sr.trajectory.near_caustic) van_vleck_amp(sr.trajectory);  // throws CausticSingular
  out.p_i = sr.p_i;
  const double launch = std::norm(phi.at(sr.p_i));
  if (launch < 1e-30) {
    std::ostringstream os;
    os << "|Psi~(p_i)|^2 = " << launch << " at p_i = " << sr.p_i << " is too small to divide by";
    fail(ErrorKind::DivisionNearZero, os.str());
  }
  out.lhs = psi_exact.density(j) / launch;
  out.rhs = 1.0 / std::abs(sr.trajectory.monodromy.m12);
  out.deviation = std::abs(out.lhs - out.rhs) / out.rhs;
  return out;
}

std::vector<TransportBin> probability_transport(const MomentumWaveFunction& phi,
                                                const PotentialSpec& potential, double x_i,
                                                double t_i, double t_f,
                                                const std::vector<double>& edges,
                                                const Units& units, const ItOptions& opts) {
  if (edges.size() < 2) fail(ErrorKind::InvalidArgument, "transport needs at least two bin edges");
  if (!std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    fail(ErrorKind::InvalidArgument, "bin edges must be strictly increasing");
  }
  for (double p : edges) {
    if (!phi.contains(p)) {
      fail(ErrorKind::MomentumOutOfRange, "bin edge p = " + std::to_string(p) + " outside momentum grid");
    }
  }

  // Image of every edge under the flow, with uniqueness certified at the edge.
  std::vector<double> images(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const TrajectoryResult traj = integrate({x_i, edges[k], t_i}, t_f, potential, units, opts.classical);
    van_vleck_amp(traj);  // throws CausticSingular
    images[k] = traj.end.x;
    if (opts.certify_unique) {
      solve_trajectory(images[k], t_f, phi, potential, x_i, t_i, units, opts);
    }
  }

  ItOptions node_opts = opts;
  node_opts.certify_unique = false;
  const double dp = phi.grid().dp();
  const double p0 = phi.grid().p_min();

  std::vector<TransportBin> bins;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    TransportBin bin;
    bin.p_a = edges[k];
    bin.p_b = edges[k + 1];
    bin.x_a = images[k];
    bin.x_b = images[k + 1];

    // Momentum side: split at grid nodes so each panel sees one cubic piece.
    auto density_p = [&](double p) { return std::norm(phi.at(p)); };
    double lo = bin.p_a;
    double mom = 0.0;
    std::size_t cells = 0;
    while (lo < bin.p_b) {
      const double next_node = p0 + (std::floor((lo - p0) / dp + 1e-12) + 1.0) * dp;
      const double hi = std::min(bin.p_b, next_node);
      if (hi > lo) mom += gauss_panel(lo, hi, density_p);
      lo = hi;
      ++cells;
    }
    bin.momentum_probability = mom;

    // Position side: uniform panels on the image interval, Psi_IT at each node.
    const double xa = std::min(bin.x_a, bin.x_b);
    const double xb = std::max(bin.x_a, bin.x_b);
    const std::size_t panels = std::max<std::size_t>(8, cells);
    const double width = (xb - xa) / static_cast<double>(panels);
    std::vector<double> node_density(panels * kGaussNodes.size());
    parallel_for(node_density.size(), [&](std::size_t idx) {
      const std::size_t panel = idx / kGaussNodes.size();
      const double mid = xa + (static_cast<double>(panel) + 0.5) * width;
      const double x = mid + 0.5 * width * kGaussNodes[idx % kGaussNodes.size()];
      node_density[idx] =
          std::norm(it_wavefunction(x, t_f, phi, potential, x_i, t_i, units, node_opts).amp);
    });
    double pos = 0.0;
    for (std::size_t idx = 0; idx < node_density.size(); ++idx) {
      pos += kGaussWeights[idx % kGaussNodes.size()] * node_density[idx];
    }
    bin.position_probability = pos * 0.5 * width;
    bins.push_back(bin);
  }
  return bins;
}

double exact_probability(const WaveFunction& psi, double a, double b) {
  if (b < a) std::swap(a, b);
  const SpatialGrid& g = psi.grid();
  const double dx = g.dx();
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < g.n(); ++j) {
    const double x0 = g.x(j);
    const double x1 = x0 + dx;
    const double lo = std::max(a, x0);
    const double hi = std::min(b, x1);
    if (hi <= lo) continue;
    const double r0 = psi.density(j);
    const double slope = (psi.density(j + 1) - r0) / dx;
    // integral of r0 + slope (x - x0) over [lo, hi]
    total += (hi - lo) * (r0 + slope * (0.5 * (lo + hi) - x0));
  }
  return total;
}

double transported_density(const MomentumWaveFunction& phi, const PotentialSpec& potential,
                           double x_i, double t_i, double p_i, double t, const Units& units,
                           const ItOptions& opts) {
  const TrajectoryResult traj = integrate({x_i, p_i, t_i}, t, potential, units, opts.classical);
  const ItSample s = it_wavefunction(traj.end.x, t, phi, potential, x_i, t_i, units, opts);
  return std::norm(s.amp) * std::abs(traj.monodromy.m12);
}

ValidityReport validity_report(double sigma, double t, const Units& units, double f_min) {
  units.validate();
  if (!(sigma > 0.0) || !(t > 0.0)) fail(ErrorKind::InvalidArgument, "validity_report needs sigma, t > 0");
  ValidityReport r;
  r.sigma = sigma;
  r.t = t;
  r.ratio = units.hbar * t / (units.mass * sigma * sigma);
  r.x_i = std::sqrt(units.hbar * t / units.mass);
  r.f = r.x_i / sigma;
  r.mean_energy = units.hbar * units.hbar / (2.0 * units.mass * sigma * sigma);
  r.action_ratio = r.mean_energy * t / units.hbar;
  r.verdict = r.f >= f_min ? ZoneVerdict::inside_zone : ZoneVerdict::outside_zone;
  return r;
}

const char* to_string(ZoneVerdict verdict) {
  return verdict == ZoneVerdict::inside_zone ? "inside_zone" : "outside_zone";
}

}  // namespace itb
