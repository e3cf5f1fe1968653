#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "qkb/bounds.hpp"
#include "qkb/error.hpp"
#include "qkb/thermal.hpp"

using namespace qkb;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("two-level Gibbs populations") {
  const auto s = thermal_spectrum({two_level_levels(), 1.0});
  const double z = 2.0 * std::cosh(0.5);
  CHECK(s.values()[0] == doctest::Approx(std::exp(-0.5) / z).epsilon(1e-14));
  CHECK(s.values()[1] == doctest::Approx(std::exp(0.5) / z).epsilon(1e-14));
  CHECK(s.values()[0] == doctest::Approx(0.2689).epsilon(1e-4));
  CHECK(classify(thermal_spectrum({two_level_levels(), 0.0})) == StateClass::MaximallyMixed);
  CHECK(classify(thermal_spectrum({two_level_levels(), kZeroTemperature})) == StateClass::Pure);
  CHECK(classify(thermal_spectrum({two_level_levels(), 800.0})) == StateClass::Pure);
}

TEST_CASE("spin bath levels") {
  const auto m2 = spin_bath_levels(2);
  CHECK(m2.energies == std::vector<double>{-1, 0, 1});
  CHECK(m2.multiplicities == std::vector<std::uint64_t>{1, 2, 1});
  const auto m1 = spin_bath_levels(1);
  CHECK(m1.energies == std::vector<double>{-0.5, 0.5});
  CHECK(m1.multiplicities == std::vector<std::uint64_t>{1, 1});
  const auto m10 = spin_bath_levels(10);
  CHECK(m10.energies.size() == 11);
  CHECK(m10.dim() == 1024);
  CHECK_THROWS_AS(spin_bath_levels(0), Error);
}

TEST_CASE("level validation and temperatures") {
  LevelSet bad{{0.0, 1.0}, {1}};
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(thermal_spectrum({two_level_levels(), -1.0}), Error);
  CHECK_THROWS_AS(thermal_surpass(two_level_levels(), 0.0, spin_bath_levels(2), 1.0, sigma_z()), Error);
  CHECK_THROWS_AS(thermal_surpass(two_level_levels(), -1.0, spin_bath_levels(2), 1.0, sigma_z()), Error);
}

TEST_CASE("grouped thermal spectrum matches the expanded one") {
  const ThermalModel sys{two_spin_levels(), 1.0};
  const ThermalModel ctrl{spin_bath_levels(3), 0.4};
  const auto g = kinematic_bounds(thermal_populations(sys), thermal_populations(ctrl), projector_pi1());
  const auto full = kinematic_bounds(composite(thermal_spectrum(sys), thermal_spectrum(ctrl), projector_pi1()));
  CHECK(g.max == doctest::Approx(full.max).epsilon(1e-13));
  CHECK(g.min == doctest::Approx(full.min).epsilon(1e-13));
}

TEST_CASE("frequency form agrees with the spectral form") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lam(0.01, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double ls = lam(rng), lc = lam(rng);
    const unsigned m = 1 + trial % 6;
    const bool two_spin = trial % 2 == 0;
    const LevelSet sys = two_spin ? two_spin_levels() : two_level_levels();
    const auto obs = two_spin ? (trial % 4 == 0 ? projector_pi0() : projector_pi1()) : sigma_z();
    const bool freq = thermal_surpass(sys, 1.0 / ls, spin_bath_levels(m), 1.0 / lc, obs);
    const bool spec = surpass_ckb(thermal_spectrum({sys, ls}), thermal_spectrum({spin_bath_levels(m), lc}), obs).upper;
    CHECK(freq == spec);
  }
}

TEST_CASE("thermal surpass examples") {
  for (double lc : {1e-3, 0.05, 0.5, 4.0})
    CHECK(thermal_surpass(two_spin_levels(), 1.0, spin_bath_levels(10), 1.0 / lc, projector_pi0()));
  CHECK_FALSE(thermal_surpass(two_level_levels(), 1.0, spin_bath_levels(10), kInf, sigma_z()));
  CHECK(thermal_bandwidth(spin_bath_levels(10), 2.0) == doctest::Approx(5.0));
}

TEST_CASE("figure 3 curve") {
  const auto grid = uniform_grid(0.0, 2.0, 400);
  CHECK(grid.size() == 400);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 2.0);
  const auto pts = figure3_curve(1.0, 10, grid);
  for (const auto& p : pts) {
    CHECK(std::abs(p.j_max + p.j_min) <= 1e-12);
    if (p.lambda_c <= 0.1) CHECK(std::abs(p.gap_to_ckb) <= 1e-12);
    CHECK(p.ckb_max == doctest::Approx(std::tanh(0.5)).epsilon(1e-13));
  }
  CHECK(pts.front().j_max == doctest::Approx(pts.front().ckb_max));
  const std::vector<double> far{5.0};
  CHECK(figure3_curve(1.0, 10, far)[0].j_max > 0.99);
}

TEST_CASE("figure 4 curve") {
  const auto grid = uniform_grid(0.0, 1.0, 400);
  const auto pi1 = figure4_curve(1.0, 10, Projector::Pi1, grid);
  const double zs = std::exp(-1.0) + 2.0 + std::exp(1.0);
  for (const auto& p : pi1) {
    CHECK(p.ckb_max == doctest::Approx(std::exp(1.0) / zs).epsilon(1e-13));
    if (p.lambda_c <= 0.1) CHECK(std::abs(p.gap_to_ckb) <= 1e-12);
    if (p.lambda_c >= 0.11) CHECK(p.gap_to_ckb > 0.0);
  }
  for (const auto& p : figure4_curve(1.0, 10, Projector::Pi0, grid))
    if (p.lambda_c > 1e-3) CHECK(p.gap_to_ckb > 0.0);
}
