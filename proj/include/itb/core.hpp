#pragma once

// Grids, wavefunctions and unit conventions shared by every module.
//
// Atomic units are the default (hbar = m = 1). The coordinate grid is uniform
// with n = 2^k points x_j = x_min + j*dx, and the conjugate momentum grid is
// p_k = (k - n/2) * dp with dp = 2*pi*hbar / (n*dx), stored in ascending order.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace itb {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct Units {
  double hbar = 1.0;
  double mass = 1.0;

  void validate() const;
};

struct PhaseSpacePoint {
  double x = 0.0;
  double p = 0.0;
  double t = 0.0;
};

class SpatialGrid {
 public:
  SpatialGrid(double x_min, double x_max, std::size_t n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t n() const noexcept { return n_; }
  double dx() const noexcept { return (x_max_ - x_min_) / static_cast<double>(n_); }
  double length() const noexcept { return x_max_ - x_min_; }
  double x(std::size_t j) const noexcept { return x_min_ + static_cast<double>(j) * dx(); }

  /// Index of the grid point closest to x, clamped to the grid.
  std::size_t nearest_index(double x) const noexcept;

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
};

class MomentumGrid {
 public:
  MomentumGrid(const SpatialGrid& grid, double hbar);

  std::size_t n() const noexcept { return n_; }
  double dp() const noexcept { return dp_; }
  double p(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(n_ / 2)) * dp_;
  }
  double p_min() const noexcept { return p(0); }
  double p_max() const noexcept { return p(n_ - 1); }

 private:
  std::size_t n_;
  double dp_;
};

/// Psi(x, t) sampled on a SpatialGrid.
class WaveFunction {
 public:
  WaveFunction(SpatialGrid grid, std::vector<cplx> amps, double t);

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::span<const cplx> amps() const noexcept { return amps_; }
  double t() const noexcept { return t_; }

  /// sum |psi|^2 dx
  double norm2() const;
  double density(std::size_t j) const { return std::norm(amps_[j]); }

  /// <x> and <p> (the latter through the momentum representation).
  double mean_x() const;
  double mean_p(double hbar) const;

 private:
  SpatialGrid grid_;
  std::vector<cplx> amps_;
  double t_;
};

/// Psi~(p, t) sampled on the conjugate MomentumGrid, with the symmetric
/// (2 pi hbar)^(-1/2) normalization.
class MomentumWaveFunction {
 public:
  MomentumWaveFunction(MomentumGrid grid, std::vector<cplx> amps, double t);

  const MomentumGrid& grid() const noexcept { return grid_; }
  std::span<const cplx> amps() const noexcept { return amps_; }
  double t() const noexcept { return t_; }

  /// sum |psi~|^2 dp
  double norm2() const;

  bool contains(double p) const noexcept {
    return p >= grid_.p_min() && p <= grid_.p_max();
  }

  /// Cubic (four-point Lagrange) interpolation of the complex amplitude.
  /// Throws MomentumOutOfRange outside [p_min, p_max].
  cplx at(double p) const;

 private:
  MomentumGrid grid_;
  std::vector<cplx> amps_;
  double t_;
};

/// Normalized Gaussian (pi sigma^2)^(-1/4) exp[-(x-x0)^2/(2 sigma^2)] exp[i p0 (x-x0)/hbar]
/// at t = 0. Throws GridTooCoarse if sigma < 4 dx and PacketClipped if more than
/// 1e-12 of the probability lies outside the grid.
WaveFunction gaussian_packet(const SpatialGrid& grid, double sigma, double x0, double p0,
                             const Units& units);

/// Probability outside [x_min, x_max] for the Gaussian above.
double gaussian_tail_mass(const SpatialGrid& grid, double sigma, double x0);

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

}  // namespace itb
