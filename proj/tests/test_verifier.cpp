#include "doctest.h"

#include <cmath>
#include <random>

#include "qkb/bounds.hpp"
#include "qkb/eigen.hpp"
#include "qkb/error.hpp"
#include "qkb/thermal.hpp"
#include "qkb/topology.hpp"
#include "qkb/verifier.hpp"
#include "support/oracles.hpp"

using namespace qkb;

namespace {

CMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) a(i, k) = {g(rng), g(rng)};
  return (a + a.adjoint()) / 2.0;
}

HermitianPair pair_of(std::vector<double> p, std::vector<double> theta) {
  return make_hermitian_pair(std::span<const double>(p), std::span<const double>(theta));
}

}  // namespace

TEST_CASE("Jacobi eigenvalues") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 0.7;
  d(1, 1) = 0.3;
  const auto dv = hermitian_eigenvalues(d);
  CHECK(dv[0] == doctest::Approx(0.3));
  CHECK(dv[1] == doctest::Approx(0.7));
  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const auto xv = hermitian_eigenvalues(x);
  CHECK(xv[0] == doctest::Approx(-1.0));
  CHECK(xv[1] == doctest::Approx(1.0));

  std::mt19937_64 rng(2);
  for (std::size_t n : {1u, 3u, 6u, 12u}) {
    const CMatrix a = random_hermitian(n, rng);
    const auto es = hermitian_eigensystem(a);
    double sum = 0.0;
    for (double v : es.values) sum += v;
    CHECK(std::abs(sum - a.trace().real()) <= 1e-10);
    CHECK(std::is_sorted(es.values.begin(), es.values.end()));
    const CMatrix rebuilt = es.vectors * Eigen::VectorXd::Map(es.values.data(), es.values.size())
                                             .cast<std::complex<double>>().asDiagonal() * es.vectors.adjoint();
    CHECK((rebuilt - a).norm() <= 1e-10 * (1.0 + a.norm()));
  }
  CMatrix nh = CMatrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eigenvalues(nh), Error);
}

TEST_CASE("skew exponential is unitary") {
  std::mt19937_64 rng(8);
  const CMatrix h = random_hermitian(5, rng);
  const CMatrix g = std::complex<double>(0, 1) * h;  // anti-Hermitian
  const SkewExponential ex(g);
  for (double eta : {0.0, 0.1, 3.0}) CHECK(unitarity_defect(ex(eta)) <= 1e-12);
  CHECK((ex(0.0) - CMatrix::Identity(5, 5)).norm() <= 1e-12);
  const CMatrix small = ex(1e-4);
  CHECK((small - (CMatrix::Identity(5, 5) + 1e-4 * g)).norm() <= 1e-6);
}

TEST_CASE("Haar unitaries") {
  std::mt19937_64 rng(1);
  const CMatrix u1 = haar_unitary(1, rng);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) <= 1e-14);
  std::mt19937_64 a(42), b(42);
  const CMatrix ua = haar_unitary(4, a);
  CHECK(ua == haar_unitary(4, b));
  CHECK(unitarity_defect(ua) <= 1e-12);

  const int samples = 10000;
  double sum = 0.0, sum_sq = 0.0;
  std::mt19937_64 rng2(123);
  for (int k = 0; k < samples; ++k) {
    const double x = std::norm(haar_unitary(4, rng2)(0, 0));
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / samples;
  const double sd = std::sqrt((sum_sq / samples - mean * mean) / samples);
  CHECK(std::abs(mean - 0.25) <= 3.0 * sd);
}

TEST_CASE("yield at identity and reversal") {
  const auto hp = pair_of({0.04, 0.06, 0.36, 0.54}, {-1, -1, 1, 1});
  const auto kb = kinematic_bounds(hp);
  CHECK(yield_of(CMatrix::Identity(4, 4), hp) == doctest::Approx(kb.max));
  CMatrix rev = CMatrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) rev(k, 3 - k) = 1.0;
  CHECK(yield_of(rev, hp) == doctest::Approx(kb.min));
  CHECK(kb.max == doctest::Approx(0.8));
  CHECK_THROWS_AS(yield_of(2.0 * CMatrix::Identity(4, 4), hp), Error);

  std::mt19937_64 rng(77);
  for (int k = 0; k < 10000; ++k) {
    const double j = yield_of(haar_unitary(4, rng), hp);
    REQUIRE(j <= kb.max + 1e-9);
    REQUIRE(j >= kb.min - 1e-9);
  }
}

TEST_CASE("hermitian pair validation") {
  CHECK_THROWS_AS(make_hermitian_pair(CMatrix::Identity(2, 2) * 0.5, CMatrix::Identity(3, 3)), Error);
  CMatrix notpsd = CMatrix::Zero(2, 2);
  notpsd(0, 0) = 1.5;
  notpsd(1, 1) = -0.5;
  CHECK_THROWS_AS(make_hermitian_pair(notpsd, CMatrix::Identity(2, 2)), Error);
  std::mt19937_64 rng(3);
  const CMatrix u = haar_unitary(3, rng);
  Eigen::VectorXcd p(3);
  p << 0.2, 0.3, 0.5;
  const CMatrix rho = u * p.asDiagonal() * u.adjoint();
  const auto hp = make_hermitian_pair(rho, random_hermitian(3, rng));
  CHECK(hp.dim() == 3);
}

TEST_CASE("gradient matches the central difference") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t ns = 2 + trial % 3, nc = 1 + trial % 3;
    const auto o = oracle::random_observable(ns, rng);
    const auto c = composite(make_spectrum(oracle::simplex(ns, rng)), make_spectrum(oracle::simplex(nc, rng)),
                             ObservableSpectrum(o.distinct, o.mult));
    const auto hp = make_hermitian_pair(c);
    const auto gc = gradient_check(hp, haar_unitary(c.dim(), rng));
    if (gc.analytic > 1e-8) CHECK(gc.relative_error <= 1e-4);
  }
}

TEST_CASE("ascent is monotone and lands on a critical value") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t ns = 2 + trial % 3, nc = 1 + trial % 2;
    const auto sys = make_spectrum(oracle::simplex(ns, rng));
    const auto ctrl = make_spectrum(oracle::simplex(nc, rng));
    const auto o = oracle::random_observable(ns, rng);
    const ObservableSpectrum obs(o.distinct, o.mult);
    const auto c = composite(sys, ctrl, obs);
    const auto hp = make_hermitian_pair(c);
    const auto crit = critical_values(sys, ctrl, obs);
    const auto tr = riemannian_ascent(hp, haar_unitary(c.dim(), rng));
    for (std::size_t k = 1; k < tr.yields.size(); ++k) CHECK(tr.yields[k] >= tr.yields[k - 1]);
    if (tr.converged) {
      double best = INFINITY;
      for (double v : crit) best = std::min(best, std::abs(v - tr.final_yield));
      CHECK(best <= 1e-6);
    }
  }
}

TEST_CASE("maximally mixed P converges immediately") {
  const auto hp = pair_of({0.25, 0.25, 0.25, 0.25}, {-1, 0, 1, 2});
  std::mt19937_64 rng(1);
  const auto tr = riemannian_ascent(hp, haar_unitary(4, rng));
  CHECK(tr.converged);
  CHECK(tr.iterations == 0);
  CHECK(tr.final_yield == doctest::Approx(0.5));
}

TEST_CASE("certificates on named instances") {
  const auto overlap = certify_bounds(pair_of({0.04, 0.06, 0.36, 0.54}, {-1, -1, 1, 1}), 20, 0);
  CHECK(overlap.certificate);
  CHECK(overlap.attained_max == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(overlap.random_start_max == doctest::Approx(0.8).epsilon(1e-6));

  const auto pure = certify_bounds(pair_of({0, 0, 0.3, 0.7}, {-1, -1, 1, 1}), 32, 1);
  CHECK(pure.certificate);
  CHECK(std::abs(pure.attained_max - 1.0) <= 1e-6);
  CHECK_FALSE(pure.violation);

  const auto two = composite(thermal_spectrum({two_level_levels(), 1.0}), make_spectrum({1.0}), sigma_z());
  const auto cert = certify_bounds(make_hermitian_pair(two), 32, 2);
  CHECK(cert.certificate);
  CHECK(std::abs(cert.attained_max - std::tanh(0.5)) <= 1e-6);

  std::mt19937_64 rng(99);
  const auto c = composite(make_spectrum(oracle::simplex(3, rng, 0.0)), make_spectrum(oracle::simplex(2, rng, 0.0)),
                           ObservableSpectrum({-1, 0.5, 2}, {1, 1, 1}));
  CHECK(certify_bounds(make_hermitian_pair(c), 50, 3).certificate);
}

TEST_CASE("seeded runs are reproducible; thread count does not change the result") {
  const auto hp = pair_of({0.1, 0.2, 0.3, 0.4}, {0, 0, 1, 1});
  CertifyConfig cfg;
  cfg.restarts = 6;
  cfg.seed = 17;
  cfg.keep_traces = true;
  const auto a = certify_bounds(hp, cfg);
  const auto b = certify_bounds(hp, cfg);
  REQUIRE(a.ascent_traces.size() == b.ascent_traces.size());
  for (std::size_t k = 0; k < a.ascent_traces.size(); ++k) CHECK(a.ascent_traces[k].yields == b.ascent_traces[k].yields);
  cfg.threads = 3;
  const auto c = certify_bounds(hp, cfg);
  CHECK(c.attained_max == a.attained_max);
  CHECK(c.attained_min == a.attained_min);
  for (std::size_t k = 0; k < a.ascent_traces.size(); ++k) CHECK(c.ascent_traces[k].yields == a.ascent_traces[k].yields);
}
