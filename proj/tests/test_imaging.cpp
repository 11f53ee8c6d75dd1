#include "doctest.h"

#include <cmath>

#include "itb/errors.hpp"
#include "itb/fourier.hpp"
#include "itb/imaging.hpp"
#include "itb/qprop.hpp"

using namespace itb;

namespace {

struct Setup {
  SpatialGrid grid;
  WaveFunction psi0;
  MomentumWaveFunction phi;
};

Setup make(double sigma = 1.0, double p0 = 0.0, double half_width = 40.0, std::size_t n = 1024,
           const Units& u = {}) {
  SpatialGrid g(-half_width, half_width, n);
  WaveFunction psi = gaussian_packet(g, sigma, 0.0, p0, u);
  MomentumWaveFunction phi = to_momentum(psi, u.hbar);
  return {g, std::move(psi), std::move(phi)};
}

double wrap(double a) { return std::remainder(a, 2.0 * kPi); }

}  // namespace

TEST_CASE("general path reproduces the free closed form") {
  const Setup s = make(1.0, 0.3);
  for (double t : {2.0, 10.0}) {
    for (double x : {-7.0, 0.0, 3.3, 9.0}) {
      const ItSample it = it_wavefunction(x, t, s.phi, FreePotential{}, 0.0, 0.0, Units{});
      CHECK(std::abs(it.amp - free_it(x, t, s.phi, Units{})) < 1e-10);
      CHECK(it.p_i == doctest::Approx(x / t).epsilon(1e-12));
      CHECK(std::abs(it.amp) == doctest::Approx(it.prefactor * std::abs(s.phi.at(it.p_i))).epsilon(1e-14));
    }
  }
}

TEST_CASE("free gaussian modulus matches the large-time form") {
  const Setup s = make(1.0, 0.0, 160.0, 4096);
  const double t = 20.0;
  for (double x : {-30.0, -4.0, 0.0, 12.5}) {
    const double expect = std::sqrt(1.0 / t) * std::pow(kPi, -0.25) * std::exp(-std::pow(x / t, 2) / 2.0);
    CHECK(std::abs(free_it(x, t, s.phi, Units{})) == doctest::Approx(expect).epsilon(1e-7));
    CHECK(std::norm(free_it(x, t, s.phi, Units{})) * t == doctest::Approx(std::norm(s.phi.at(x / t))).epsilon(1e-12));
  }
}

TEST_CASE("free phase equals action over hbar minus pi/4") {
  const Setup s = make(1.0, 0.7);
  const double t = 5.0;
  for (double x : {-3.0, 1.0, 6.0}) {
    const ItSample it = it_wavefunction(x, t, s.phi, FreePotential{}, 0.0, 0.0, Units{});
    const double p = x / t;
    const double lhs = std::arg(it.amp) - std::arg(s.phi.at(p));
    CHECK(std::abs(wrap(lhs - (p * p * t / 2.0 - kPi / 4.0))) < 1e-10);
    CHECK(std::abs(wrap(lhs - it.phase)) < 1e-10);
  }
}

TEST_CASE("uniform force: amplitude uses the shifted launch momentum") {
  const Setup s = make();
  const double F = 0.5, t = 4.0, m = 1.0;
  for (double x : {-2.0, 4.0, 9.0}) {
    const ItSample it = it_wavefunction(x, t, s.phi, LinearPotential{F}, 0.0, 0.0, Units{});
    const double p = m * x / t - F * t / 2.0;
    CHECK(it.p_i == doctest::Approx(p).epsilon(1e-10));
    CHECK(std::abs(it.amp) == doctest::Approx(std::sqrt(m / t) * std::abs(s.phi.at(p))).epsilon(1e-10));
  }
}

TEST_CASE("trajectory density equals m/t for free motion") {
  const Setup s = make(1.0, 0.0, 80.0, 2048);
  for (double t : {3.0, 10.0}) {
    const WaveFunction exact = analytic_propagate(s.psi0, FreePotential{}, t, Units{});
    for (double x : {-5.0, 0.0, 2.0}) {
      const DensityRatio d = density_ratio_check(x, t, exact, s.phi, FreePotential{}, 0.0, 0.0, Units{});
      CHECK(std::abs(d.rhs - 1.0 / t) <= 1e-12 / t);
    }
  }
}

TEST_CASE("central density deviation follows the closed-form oracle") {
  // At x = 0: lhs = 1/sqrt(1 + t^2), rhs = 1/t.
  for (double t : {10.0, 20.0, 40.0, 100.0}) {
    const Setup s = make(1.0, 0.0, 8.0 * t + 40.0, next_power_of_two(static_cast<std::size_t>(2 * (8 * t + 40) / 0.2)));
    const WaveFunction exact = analytic_propagate(s.psi0, FreePotential{}, t, Units{});
    const DensityRatio d = density_ratio_check(0.0, t, exact, s.phi, FreePotential{}, 0.0, 0.0, Units{});
    const double oracle = 1.0 - t / std::sqrt(1.0 + t * t);
    CHECK(d.deviation == doctest::Approx(oracle).epsilon(1e-6));
    if (t == 100.0) CHECK(d.deviation < 0.05);
  }
  // The leading correction is second order in the inverse ratio.
  const double r = (1.0 - 10.0 / std::sqrt(101.0)) / (1.0 - 20.0 / std::sqrt(401.0));
  CHECK(r == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("probability transport: normalization and parity") {
  const Setup s = make(1.0, 0.0, 160.0, 4096);
  const double t = 6.0;
  const auto full = probability_transport(s.phi, FreePotential{}, 0.0, 0.0, t, {-9.0, 9.0}, Units{});
  REQUIRE(full.size() == 1);
  CHECK(full[0].momentum_probability == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(full[0].position_probability == doctest::Approx(1.0).epsilon(1e-8));

  const auto bins = probability_transport(s.phi, FreePotential{}, 0.0, 0.0, t, {-2.0, -0.5, 0.5, 2.0}, Units{});
  CHECK(bins[0].momentum_probability == doctest::Approx(bins[2].momentum_probability).epsilon(1e-12));
  CHECK(bins[0].position_probability == doctest::Approx(bins[2].position_probability).epsilon(1e-10));
}

TEST_CASE("probability transport is an identity of the construction") {
  const Setup s = make(1.0, 0.4, 60.0, 1024);
  for (const PotentialSpec& v :
       std::vector<PotentialSpec>{FreePotential{}, LinearPotential{0.3}, HarmonicPotential{0.2}}) {
    const auto bins = probability_transport(s.phi, v, 0.0, 0.0, 5.0, {-1.6, -0.6, 0.4, 1.4, 2.4}, Units{});
    for (const auto& b : bins) {
      CHECK(std::abs(b.momentum_probability - b.position_probability) < 1e-6);
      CHECK(b.x_b > b.x_a);
    }
  }
}

TEST_CASE("transported density is constant along a trajectory") {
  const Setup s = make(1.0, 0.4, 60.0, 1024);
  for (const PotentialSpec& v :
       std::vector<PotentialSpec>{FreePotential{}, LinearPotential{0.3}, HarmonicPotential{0.2}}) {
    for (double p : {-0.5, 0.4, 1.3}) {
      const double a = transported_density(s.phi, v, 0.0, 0.0, p, 2.0, Units{});
      const double b = transported_density(s.phi, v, 0.0, 0.0, p, 7.0, Units{});
      CHECK(std::abs(a - b) <= 1e-8 * std::max(a, 1e-300));
      CHECK(a == doctest::Approx(std::norm(s.phi.at(p))).epsilon(1e-9));
    }
  }
}

TEST_CASE("imaging errors") {
  const Setup s = make();
  CHECK_THROWS_WITH_AS(it_wavefunction(0.5, kPi, s.phi, HarmonicPotential{1.0}, 0.0, 0.0, Units{}),
                       doctest::Contains("caustic"), Error);
  CHECK_THROWS_WITH_AS(it_wavefunction(0.5, kPi, s.phi, HarmonicPotential{1.0}, 0.0, 0.0, Units{}),
                       doctest::Contains("CausticSingular"), Error);
  CHECK_THROWS_WITH_AS(it_wavefunction(1e4, 1.0, s.phi, FreePotential{}, 0.0, 0.0, Units{}),
                       doctest::Contains("MomentumOutOfRange"), Error);
  const WaveFunction exact = analytic_propagate(s.psi0, FreePotential{}, 2.0, Units{});
  CHECK_THROWS_WITH_AS(density_ratio_check(30.0, 2.0, exact, s.phi, FreePotential{}, 0.0, 0.0, Units{}),
                       doctest::Contains("DivisionNearZero"), Error);
  CHECK_THROWS_AS(it_wavefunction(1.0, 0.0, s.phi, FreePotential{}, 0.0, 0.0, Units{}), Error);
  CHECK_THROWS_AS(free_it(1.0, 0.0, s.phi, Units{}), Error);
}

TEST_CASE("multiple trajectories are refused when certified") {
  // Stiff quartic: a momentum-rich packet reaches x = 0.3 along several branches.
  const Setup s = make(0.5, 0.0, 20.0, 1024);
  const PotentialSpec quartic = PolynomialPotential{{0.0, 0.0, 0.0, 0.0, 1.0}};
  CHECK_THROWS_WITH_AS(it_wavefunction(0.3, 4.0, s.phi, quartic, 0.0, 0.0, Units{}),
                       doctest::Contains("MultipleRoots"), Error);
}

TEST_CASE("validity report numbers") {
  const ValidityReport e = validity_report(1.0, 1e4, Units{1.0, 1.0});
  CHECK(e.x_i == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(e.f == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(e.verdict == ZoneVerdict::inside_zone);
  CHECK(e.action_ratio == doctest::Approx(e.f * e.f / 2.0).epsilon(1e-15));

  const ValidityReport p = validity_report(1.0, 1836.0 * 1e4, Units{1.0, 1836.0});
  CHECK(p.f == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(p.t == doctest::Approx(1.836e7));

  const ValidityReport b = validity_report(1.0, 2.0, Units{});
  CHECK(b.f == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(std::abs(b.action_ratio - 1.0) <= 4e-16);
  CHECK(b.verdict == ZoneVerdict::outside_zone);
  CHECK(validity_report(1.0, 2.0, Units{}, 1.0).verdict == ZoneVerdict::inside_zone);
  CHECK_THROWS_AS(validity_report(0.0, 1.0, Units{}), Error);
}

TEST_CASE("validity verdict is independent of mass under t = m f^2 sigma^2 / hbar") {
  for (double f : {3.0, 10.0, 100.0}) {
    for (double sigma : {0.5, 2.0}) {
      const ValidityReport ref = validity_report(sigma, f * f * sigma * sigma, Units{});
      for (double m : {1.0, 1836.0, 1e5}) {
        const ValidityReport r = validity_report(sigma, m * f * f * sigma * sigma, Units{1.0, m});
        CHECK(r.f == doctest::Approx(ref.f).epsilon(1e-14));
        CHECK(r.verdict == ref.verdict);
        CHECK(r.action_ratio == doctest::Approx(ref.action_ratio).epsilon(1e-14));
      }
    }
  }
}
