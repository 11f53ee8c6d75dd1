#include "itb/fourier.hpp"

#include <cmath>

#include "fft.hpp"
#include "itb/errors.hpp"

namespace itb {

// With x_j = x_min + j dx and p_k = (k - n/2) dp, the kernel factorizes as
//   exp(-i p_k x_j / hbar) = exp(-i p_k x_min / hbar) (-1)^j exp(-2 pi i jk / n),
// so one FFT of (-1)^j psi_j yields the centred spectrum directly.

MomentumWaveFunction to_momentum(const WaveFunction& psi, double hbar) {
  const SpatialGrid& grid = psi.grid();
  const MomentumGrid pgrid(grid, hbar);
  const std::size_t n = grid.n();

  std::vector<cplx> work(psi.amps().begin(), psi.amps().end());
  for (std::size_t j = 1; j < n; j += 2) work[j] = -work[j];
  detail::Fft fft(n);
  fft.forward(work);

  const double scale = grid.dx() / std::sqrt(2.0 * kPi * hbar);
  for (std::size_t k = 0; k < n; ++k) {
    work[k] *= scale * std::polar(1.0, -pgrid.p(k) * grid.x_min() / hbar);
  }
  return MomentumWaveFunction(pgrid, std::move(work), psi.t());
}

WaveFunction from_momentum(const MomentumWaveFunction& phi, const SpatialGrid& grid,
                           double hbar) {
  const std::size_t n = grid.n();
  if (phi.grid().n() != n) fail(ErrorKind::InvalidArgument, "momentum/spatial grid size mismatch");
  const MomentumGrid pgrid(grid, hbar);

  std::vector<cplx> work(n);
  for (std::size_t k = 0; k < n; ++k) {
    work[k] = phi.amps()[k] * std::polar(1.0, pgrid.p(k) * grid.x_min() / hbar);
  }
  detail::Fft fft(n);
  fft.backward(work);

  const double scale = pgrid.dp() / std::sqrt(2.0 * kPi * hbar);
  for (std::size_t j = 0; j < n; ++j) {
    work[j] *= (j % 2 == 0) ? scale : -scale;
  }
  return WaveFunction(grid, std::move(work), phi.t());
}

}  // namespace itb
