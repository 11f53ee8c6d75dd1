#pragma once

#include <string>
#include <variant>
#include <vector>

#include "itb/core.hpp"

namespace itb {

struct FreePotential {
  friend bool operator==(const FreePotential&, const FreePotential&) = default;
};

/// Uniform field: V(x) = -force * x.
struct LinearPotential {
  double force = 0.0;
  friend bool operator==(const LinearPotential&, const LinearPotential&) = default;
};

/// V(x) = m omega^2 x^2 / 2.
struct HarmonicPotential {
  double omega = 1.0;
  friend bool operator==(const HarmonicPotential&, const HarmonicPotential&) = default;
};

/// V(x) = sum_k c_k x^k, degree <= 6.
struct PolynomialPotential {
  std::vector<double> coefficients;
  friend bool operator==(const PolynomialPotential&, const PolynomialPotential&) = default;
};

using PotentialSpec =
    std::variant<FreePotential, LinearPotential, HarmonicPotential, PolynomialPotential>;

inline constexpr std::size_t kMaxPolynomialDegree = 6;

struct PotentialValues {
  double v = 0.0;
  double dv = 0.0;
  double d2v = 0.0;
};

void validate(const PotentialSpec& potential);

/// V, V', V'' in closed form. The harmonic variant needs the mass.
PotentialValues potential_eval(const PotentialSpec& potential, double x, const Units& units);

/// True for potentials at most quadratic in x (free, linear, harmonic).
bool is_quadratic(const PotentialSpec& potential);

/// Parses "free", "linear:force=F", "harmonic:omega=W",
/// "polynomial:c=c0,c1,...". Throws InvalidArgument on malformed text.
PotentialSpec parse_potential(const std::string& text);
std::string describe(const PotentialSpec& potential);

}  // namespace itb
