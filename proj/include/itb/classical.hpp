#pragma once

// Classical-mechanics engine: velocity-Verlet trajectories carrying the
// discrete action and the tangent map, two-point shooting, Van Vleck
// amplitudes and the mixed (momentum-launched) action.

#include <array>
#include <cstddef>
#include <vector>

#include "itb/core.hpp"
#include "itb/potential.hpp"

namespace itb {

/// 2x2 tangent map d(x_f, p_f) / d(x_i, p_i).
struct Monodromy {
  double m11 = 1.0;  // dx_f/dx_i
  double m12 = 0.0;  // dx_f/dp_i
  double m21 = 0.0;  // dp_f/dx_i
  double m22 = 1.0;  // dp_f/dp_i

  double det() const noexcept { return m11 * m22 - m12 * m21; }
};

struct TrajectoryResult {
  PhaseSpacePoint start;
  PhaseSpacePoint end;
  double action = 0.0;  // S_c(x_f, t_f; x_i, t_i)
  Monodromy monodromy;
  bool near_caustic = false;
  std::size_t steps = 0;
  double energy_drift = 0.0;  // max relative |E - E_0| along the path
};

struct ClassicalConfig {
  /// Verlet step; <= 0 starts from default_time_step and halves it (up to 6
  /// times) while the drift exceeds energy_tol.
  double dt = 0.0;
  /// near_caustic when |M12| < caustic_eps * (t_f - t_i) / m.
  double caustic_eps = 1e-5;
  std::size_t max_iter = 50;
  double energy_tol = 1e-8;
};

/// Starting Verlet step: free and linear motion is integrated exactly in one
/// step, curved potentials start fine.
double default_time_step(const PotentialSpec& potential, double span);

/// Velocity-Verlet integration of (x, p), the Lagrangian action and the
/// linearized equations. The action is the discrete Verlet action, which
/// satisfies dS/dx_f = p_f and dS/dx_i = -p_i exactly for the discrete map.
/// Throws StepTooLarge if the relative energy drift exceeds cfg.energy_tol.
TrajectoryResult integrate(const PhaseSpacePoint& start, double t_f, const PotentialSpec& potential,
                           const Units& units, const ClassicalConfig& cfg = {});

struct ShootingResult {
  double p_i = 0.0;
  TrajectoryResult trajectory;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct ShootOptions {
  /// Run multi_start_scan over p_range first and throw MultipleRoots if it
  /// finds more than one trajectory.
  bool certify_unique = true;
  /// Empty range (lo >= hi) means p_guess -/+ 4 max(1, |p_guess|).
  double p_lo = 0.0;
  double p_hi = 0.0;
  std::size_t n_starts = 8;
};

/// Newton tolerance on x_f: 1e-10 max(1, |x_f|).
double shooting_tolerance(double x_f) noexcept;

/// Finds p_i with x(t_f; x_i, p_i, t_i) = x_f by Newton iteration on M12.
/// Throws NoConvergence, NearCaustic or MultipleRoots.
ShootingResult shoot(double x_i, double t_i, double x_f, double t_f, const PotentialSpec& potential,
                     double p_guess, const Units& units, const ClassicalConfig& cfg = {},
                     const ShootOptions& opts = {});

/// Newton from n_starts evenly spaced guesses in [p_lo, p_hi]; converged roots
/// closer than 1e-6 max(1, |p|) are merged. Failed starts are dropped.
std::vector<double> multi_start_scan(double x_i, double t_i, double x_f, double t_f,
                                     const PotentialSpec& potential, double p_lo, double p_hi,
                                     std::size_t n_starts, const Units& units,
                                     const ClassicalConfig& cfg = {});

/// |d^2 S/dx_f dx_i|^(1/2) = |M12|^(-1/2). Throws CausticSingular near a caustic.
double van_vleck_amp(const TrajectoryResult& traj);

struct MixedAction {
  double value = 0.0;     // S~ = S_c(x_f, t_f; x, t_i) + p (x - x_ref)
  double launch_x = 0.0;  // x reaching x_f at t_f with initial momentum p
  TrajectoryResult trajectory;
};

/// Legendre-transformed action at fixed final point and initial momentum.
/// The launch point is found by Newton on M11; throws NoConvergence when it
/// cannot be located.
MixedAction mixed_action(double x_f, double t_f, double p, double t_i, double x_ref,
                         const PotentialSpec& potential, const Units& units,
                         const ClassicalConfig& cfg = {});

struct DeterminantIdentity {
  double p_i = 0.0;
  double jacobian_factor = 0.0;  // |dx_f/dx_i|^(-1/2) from the tangent map
  double hessian_factor = 0.0;   // |d^2 S~/dp^2|^(-1/2) from finite differences
  double van_vleck = 0.0;        // |d^2 S/dx_f dx_i|^(1/2) from the tangent map
  double deviation = 0.0;        // relative gap between the product and van_vleck
};

/// Evaluates both sides of the Van Vleck determinant identity for the unique
/// trajectory from (x_i, t_i) to (x_f, t_f).
DeterminantIdentity check_determinant_identity(double x_f, double t_f, double x_i, double t_i,
                                               const PotentialSpec& potential, const Units& units,
                                               const ClassicalConfig& cfg = {});

}  // namespace itb
