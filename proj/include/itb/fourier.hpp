#pragma once

#include "itb/core.hpp"

namespace itb {

/// Psi~(p) = (2 pi hbar)^(-1/2) sum_j exp(-i p x_j / hbar) Psi(x_j) dx on the
/// conjugate grid. The exp(-i p x_min / hbar) factor keeps the result tied to
/// physical positions, so shifting the box does not change Psi~.
MomentumWaveFunction to_momentum(const WaveFunction& psi, double hbar);

/// Exact inverse of to_momentum on the same grid pair.
WaveFunction from_momentum(const MomentumWaveFunction& phi, const SpatialGrid& grid,
                           double hbar);

}  // namespace itb
