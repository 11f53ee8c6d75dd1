#pragma once

// The imaging-theorem wavefunction built from a single classical trajectory,
// the trajectory-density and probability-transport checks, and the
// transition-zone diagnostics.

#include <vector>

#include "itb/classical.hpp"
#include "itb/core.hpp"
#include "itb/potential.hpp"

namespace itb {

struct ItSample {
  double x_f = 0.0;
  double t_f = 0.0;
  double p_i = 0.0;
  double prefactor = 0.0;  // |d^2 S/dx_f dx_i|^(1/2)
  double phase = 0.0;      // S_c/hbar - pi/4
  cplx amp;
};

struct ItOptions {
  /// Certify a single trajectory with multi_start_scan over the momentum
  /// support of Psi~ (|Psi~|^2 > 1e-12 of the peak).
  bool certify_unique = true;
  std::size_t n_starts = 8;
  ClassicalConfig classical;
};

/// Psi_IT(x_f, t_f) = e^(-i pi/4) |d^2 S/dx_f dx_i|^(1/2) e^(i S_c/hbar) Psi~(p_i, t_i)
/// for the trajectory launched from x_i at t_i that reaches x_f at t_f.
/// phi is taken as the momentum wavefunction at t_i.
/// Throws CausticSingular, MultipleRoots or MomentumOutOfRange.
ItSample it_wavefunction(double x_f, double t_f, const MomentumWaveFunction& phi,
                         const PotentialSpec& potential, double x_i, double t_i,
                         const Units& units, const ItOptions& opts = {});

/// Free-particle closed form (m/(i t))^(1/2) exp[i p^2 t/(2 m hbar)] Psi~(p), p = m x/t,
/// with t the time elapsed since phi.
cplx free_it(double x, double t, const MomentumWaveFunction& phi, const Units& units);

struct DensityRatio {
  double x_f = 0.0;  // snapped to the exact-wavefunction grid
  double p_i = 0.0;
  double lhs = 0.0;  // |Psi_exact(x_f)|^2 / |Psi~(p_i)|^2
  double rhs = 0.0;  // |d^2 S/dx_f dx_i| = 1/|M12|
  double deviation = 0.0;
};

/// Compares the quantum density ratio with the classical trajectory density.
/// Throws DivisionNearZero when |Psi~(p_i)|^2 < 1e-30.
DensityRatio density_ratio_check(double x_f, double t_f, const WaveFunction& psi_exact,
                                 const MomentumWaveFunction& phi, const PotentialSpec& potential,
                                 double x_i, double t_i, const Units& units,
                                 const ItOptions& opts = {});

struct TransportBin {
  double p_a = 0.0;
  double p_b = 0.0;
  double x_a = 0.0;  // x_f(p_a)
  double x_b = 0.0;  // x_f(p_b)
  double momentum_probability = 0.0;  // integral of |Psi~|^2 over [p_a, p_b]
  double position_probability = 0.0;  // integral of |Psi_IT|^2 over the image interval
};

/// Maps each momentum bin [edges[k], edges[k+1]] through the classical flow
/// and integrates |Psi_IT(., t_f)|^2 over the image interval.
std::vector<TransportBin> probability_transport(const MomentumWaveFunction& phi,
                                                const PotentialSpec& potential, double x_i,
                                                double t_i, double t_f,
                                                const std::vector<double>& edges,
                                                const Units& units, const ItOptions& opts = {});

/// Integral of |psi|^2 over [a, b] (linear interpolation of the density between grid points).
double exact_probability(const WaveFunction& psi, double a, double b);

/// |Psi_IT(x_f(t), t)|^2 |dx_f/dp_i| at the point reached by the trajectory
/// launched with p_i, i.e. the probability per unit initial momentum carried
/// along that trajectory. Constant in t.
double transported_density(const MomentumWaveFunction& phi, const PotentialSpec& potential,
                           double x_i, double t_i, double p_i, double t, const Units& units,
                           const ItOptions& opts = {});

enum class ZoneVerdict { inside_zone, outside_zone };

struct ValidityReport {
  double sigma = 0.0;
  double t = 0.0;
  double ratio = 0.0;         // hbar t / (m sigma^2)
  double x_i = 0.0;           // sqrt(hbar t / m)
  double f = 0.0;             // x_i / sigma
  double mean_energy = 0.0;   // hbar^2 / (2 m sigma^2)
  double action_ratio = 0.0;  // mean_energy t / hbar = f^2 / 2
  ZoneVerdict verdict = ZoneVerdict::outside_zone;
};

inline constexpr double kDefaultZoneFactor = 10.0;

ValidityReport validity_report(double sigma, double t, const Units& units,
                               double f_min = kDefaultZoneFactor);

const char* to_string(ZoneVerdict verdict);

}  // namespace itb
