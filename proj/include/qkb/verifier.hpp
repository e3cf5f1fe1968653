#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qkb/bounds.hpp"
#include "qkb/eigen.hpp"
#include "qkb/spectra.hpp"

namespace qkb {

/// Composite state P and observable Theta as matrices.
struct HermitianPair {
  CMatrix p_mat;
  CMatrix theta_mat;

  Eigen::Index dim() const noexcept { return p_mat.rows(); }
};

/// Diagonal pair built from a composite spectrum.
HermitianPair make_hermitian_pair(const CompositeSpectra& c);
HermitianPair make_hermitian_pair(std::span<const double> p, std::span<const double> theta);

/// General Hermitian pair. Throws NotHermitian, DimensionMismatch, or
/// NotNormalized when Tr P differs from 1 by more than 1e-10.
HermitianPair make_hermitian_pair(CMatrix p, CMatrix theta);

/// Kinematic bounds of a pair, from the eigenvalues of both matrices.
YieldRange kinematic_bounds(const HermitianPair& hp);

/// ||U^dag U - I||_F
double unitarity_defect(const CMatrix& u);

/// Tr(U P U^dag Theta). Throws NotUnitary when the defect exceeds 1e-10.
double yield_of(const CMatrix& u, const HermitianPair& hp);

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// R's diagonal moved into Q.
CMatrix haar_unitary(std::size_t n, std::mt19937_64& rng);

struct AscentConfig {
  double step = 0.0;  // <= 0 selects 0.1 / ||Theta||_F
  double shrink = 0.5;
  double grad_tol = 1e-8;
  std::size_t max_iter = 5000;
  std::size_t reorthonormalize_every = 50;
};

struct AscentTrace {
  std::vector<double> yields;      // one entry per accepted iterate, start included
  std::vector<double> grad_norms;  // ||[Theta, U P U^dag]||_F at each iterate
  bool converged = false;
  double final_yield = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  CMatrix final_unitary;
};

/// Gradient ascent of J(U) = Tr(U P U^dag Theta) along U <- exp(eta G) U with
/// G = [Theta, U P U^dag]. Each step backtracks (eta *= shrink) until the
/// yield increases; accepted steps let eta grow back by 1/shrink.
AscentTrace riemannian_ascent(const HermitianPair& hp, const CMatrix& start,
                              const AscentConfig& cfg = {}, std::uint64_t seed = 0);

/// Directional derivative of J along G = [Theta, U P U^dag] at eta = 0:
/// the analytic value ||G||_F^2 against a central difference.
struct GradientCheck {
  double analytic = 0.0;
  double finite_difference = 0.0;
  double relative_error = 0.0;
};

GradientCheck gradient_check(const HermitianPair& hp, const CMatrix& u, double h = 1e-6);

struct CertifyConfig {
  std::size_t restarts = 32;
  std::uint64_t seed = 0;
  AscentConfig ascent;
  std::size_t haar_samples = 0;  // extra unoptimized Haar draws checked against the bounds
  unsigned threads = 1;
  bool keep_traces = false;
};

struct Certificate {
  double kin_max = 0.0;
  double kin_min = 0.0;
  double attained_max = 0.0;
  double attained_min = 0.0;
  double random_start_max = 0.0;  // best over Haar starts only
  double random_start_min = 0.0;
  double highest_seen = 0.0;      // over every sample and iterate
  double lowest_seen = 0.0;
  bool violation = false;         // some U beat the closed-form bounds by > 1e-9
  bool certificate = false;
  std::size_t runs = 0;
  std::size_t converged_runs = 0;
  std::vector<AscentTrace> ascent_traces;   // identity start first, when kept
  std::vector<AscentTrace> descent_traces;
};

/// Runs ascent and descent (ascent on -Theta) from the identity and from
/// `restarts` Haar starts. Restart k draws from a generator seeded with
/// (seed, k), so results do not depend on the thread count.
Certificate certify_bounds(const HermitianPair& hp, const CertifyConfig& cfg);

inline Certificate certify_bounds(const HermitianPair& hp, std::size_t restarts,
                                  std::uint64_t seed) {
  CertifyConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = seed;
  return certify_bounds(hp, cfg);
}

/// Generator for restart `index` under `seed`.
std::mt19937_64 child_rng(std::uint64_t seed, std::uint64_t index);

/// Thread count from QKB_THREADS (default 1, clamped to >= 1).
unsigned threads_from_env();

}  // namespace qkb
