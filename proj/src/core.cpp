#include "itb/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "itb/errors.hpp"
#include "itb/fourier.hpp"

namespace itb {

void Units::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) fail(ErrorKind::InvalidArgument, "hbar must be > 0");
  if (!(mass > 0.0) || !std::isfinite(mass)) fail(ErrorKind::InvalidArgument, "mass must be > 0");
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

SpatialGrid::SpatialGrid(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    fail(ErrorKind::InvalidArgument, "grid requires finite x_max > x_min");
  }
  if (n < 16 || !is_power_of_two(n)) {
    std::ostringstream os;
    os << "grid size must be a power of two >= 16, got " << n;
    fail(ErrorKind::InvalidArgument, os.str());
  }
}

std::size_t SpatialGrid::nearest_index(double x) const noexcept {
  const double u = std::round((x - x_min_) / dx());
  if (!(u > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(u), n_ - 1);
}

MomentumGrid::MomentumGrid(const SpatialGrid& grid, double hbar)
    : n_(grid.n()), dp_(2.0 * kPi * hbar / grid.length()) {}

WaveFunction::WaveFunction(SpatialGrid grid, std::vector<cplx> amps, double t)
    : grid_(grid), amps_(std::move(amps)), t_(t) {
  if (amps_.size() != grid_.n()) fail(ErrorKind::InvalidArgument, "amplitude count != grid size");
}

double WaveFunction::norm2() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s * grid_.dx();
}

double WaveFunction::mean_x() const {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < amps_.size(); ++j) {
    const double rho = std::norm(amps_[j]);
    num += grid_.x(j) * rho;
    den += rho;
  }
  return num / den;
}

double WaveFunction::mean_p(double hbar) const {
  const MomentumWaveFunction phi = to_momentum(*this, hbar);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < phi.amps().size(); ++k) {
    const double rho = std::norm(phi.amps()[k]);
    num += phi.grid().p(k) * rho;
    den += rho;
  }
  return num / den;
}

MomentumWaveFunction::MomentumWaveFunction(MomentumGrid grid, std::vector<cplx> amps, double t)
    : grid_(grid), amps_(std::move(amps)), t_(t) {
  if (amps_.size() != grid_.n()) fail(ErrorKind::InvalidArgument, "amplitude count != grid size");
}

double MomentumWaveFunction::norm2() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s * grid_.dp();
}

cplx MomentumWaveFunction::at(double p) const {
  if (!contains(p)) {
    std::ostringstream os;
    os << "p = " << p << " outside momentum grid [" << grid_.p_min() << ", " << grid_.p_max()
       << "]";
    fail(ErrorKind::MomentumOutOfRange, os.str());
  }
  const std::size_t n = grid_.n();
  const double u = (p - grid_.p_min()) / grid_.dp();
  // Stencil i0..i0+3 around the cell containing u, shifted inward at the edges.
  auto cell = static_cast<std::ptrdiff_t>(std::floor(u));
  std::ptrdiff_t i0 = cell - 1;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(n) - 4);
  const double s = u - static_cast<double>(i0);
  const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
  const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
  const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
  const auto* a = amps_.data() + i0;
  return w0 * a[0] + w1 * a[1] + w2 * a[2] + w3 * a[3];
}

double gaussian_tail_mass(const SpatialGrid& grid, double sigma, double x0) {
  // |psi|^2 is a normal density with standard deviation sigma / sqrt(2).
  const double upper = 0.5 * std::erfc((grid.x_max() - x0) / sigma);
  const double lower = 0.5 * std::erfc((x0 - grid.x_min()) / sigma);
  return upper + lower;
}

WaveFunction gaussian_packet(const SpatialGrid& grid, double sigma, double x0, double p0,
                             const Units& units) {
  units.validate();
  if (!(sigma > 0.0)) fail(ErrorKind::InvalidArgument, "sigma must be > 0");
  if (sigma < 4.0 * grid.dx()) {
    std::ostringstream os;
    os << "sigma = " << sigma << " is below 4 dx = " << 4.0 * grid.dx();
    fail(ErrorKind::GridTooCoarse, os.str());
  }
  const double tail = gaussian_tail_mass(grid, sigma, x0);
  if (tail > 1e-12) {
    std::ostringstream os;
    os << "packet mass " << tail << " lies outside [" << grid.x_min() << ", " << grid.x_max()
       << "]";
    fail(ErrorKind::PacketClipped, os.str());
  }
  const double norm = std::pow(kPi * sigma * sigma, -0.25);
  std::vector<cplx> amps(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double d = grid.x(j) - x0;
    amps[j] = norm * std::exp(-d * d / (2.0 * sigma * sigma)) * std::polar(1.0, p0 * d / units.hbar);
  }
  return WaveFunction(grid, std::move(amps), 0.0);
}

}  // namespace itb
