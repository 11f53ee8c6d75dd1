#pragma once

// Exact quantum propagation: Strang split-operator stepping for any potential
// and closed-form kernels for the free, linear and harmonic cases.

#include <cstddef>

#include "itb/core.hpp"
#include "itb/potential.hpp"

namespace itb {

struct PropagatorConfig {
  double dt = 1e-3;
  std::size_t n_steps = 0;
};

/// Probability density allowed in the edge strips of the box after propagation.
inline constexpr double kBoxEscapeThreshold = 1e-10;

/// Probability in the outermost n/32 points at each end of the box.
double boundary_density(const WaveFunction& psi);

/// Largest dt accepted by propagate on this grid: the kinetic phase
/// p_max^2 dt / (2 m hbar) at the grid edge must stay below pi/4.
double max_stable_dt(const SpatialGrid& grid, const Units& units);

/// Advances psi by n_steps * dt with the symmetric splitting
/// exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2).
/// Throws AliasRisk if dt >= max_stable_dt and BoxEscape if the final state
/// has more than kBoxEscapeThreshold probability at the box edges.
WaveFunction propagate(const WaveFunction& psi, const PotentialSpec& potential,
                       const PropagatorConfig& cfg, const Units& units);

/// Closed-form free evolution of the Gaussian of width sigma released at the
/// origin with zero mean momentum:
/// (sigma^2/pi)^(1/4) (sigma^2 + i hbar t/m)^(-1/2) exp[-(x^2/2)(sigma^2 - i hbar t/m)/(sigma^4 + hbar^2 t^2/m^2)].
cplx analytic_free_gaussian(double sigma, double x, double t, const Units& units);

/// Applies the closed-form propagator for time t using momentum-space
/// multiplications only. Throws UnsupportedPotential for polynomials and
/// BoxEscape as propagate does.
WaveFunction analytic_propagate(const WaveFunction& psi, const PotentialSpec& potential,
                                double t, const Units& units);

}  // namespace itb
