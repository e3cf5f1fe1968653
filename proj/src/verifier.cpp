#include "qkb/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

namespace qkb {
namespace {

using cd = std::complex<double>;

// Re Tr(rho Theta) without forming the product.
double trace_product(const CMatrix& rho, const CMatrix& theta) {
  return (rho.array() * theta.transpose().array()).sum().real();
}

double raw_yield(const CMatrix& u, const HermitianPair& hp) {
  const CMatrix rho = u * hp.p_mat * u.adjoint();
  return trace_product(rho, hp.theta_mat);
}

CMatrix reorthonormalize(const CMatrix& u) {
  Eigen::HouseholderQR<CMatrix> qr(u);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const cd d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= mag > 0.0 ? d / mag : cd(1.0);
  }
  return q;
}

YieldRange paired(std::vector<double> p, std::vector<double> theta) {
  std::sort(p.begin(), p.end());
  std::sort(theta.begin(), theta.end());
  YieldRange out;
  const std::size_t n = p.size();
  for (std::size_t k = 0; k < n; ++k) {
    out.max += p[k] * theta[k];
    out.min += p[n - 1 - k] * theta[k];
  }
  return out;
}

bool is_diagonal(const CMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j && a(i, j) != cd(0.0)) return false;
  return true;
}

std::vector<double> spectrum_of(const CMatrix& a) {
  if (!is_diagonal(a)) return hermitian_eigenvalues(a);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < a.rows(); ++k) out.push_back(a(k, k).real());
  return out;
}

}  // namespace

HermitianPair make_hermitian_pair(std::span<const double> p, std::span<const double> theta) {
  if (p.size() != theta.size())
    throw Error(ErrorKind::DimensionMismatch, "P and Theta spectra differ in length");
  const auto n = static_cast<Eigen::Index>(p.size());
  HermitianPair hp{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    hp.p_mat(k, k) = p[static_cast<std::size_t>(k)];
    hp.theta_mat(k, k) = theta[static_cast<std::size_t>(k)];
  }
  return hp;
}

HermitianPair make_hermitian_pair(const CompositeSpectra& c) {
  return make_hermitian_pair(c.big_p.values(), c.big_theta);
}

HermitianPair make_hermitian_pair(CMatrix p, CMatrix theta) {
  if (p.rows() != p.cols() || theta.rows() != theta.cols() || p.rows() != theta.rows())
    throw Error(ErrorKind::DimensionMismatch, "P and Theta must be square of equal size");
  for (const CMatrix* m : {&p, &theta}) {
    const double asym = (*m - m->adjoint()).norm();
    if (asym > 1e-10) {
      std::ostringstream os;
      os << "||A - A^dag||_F = " << asym;
      throw Error(ErrorKind::NotHermitian, os.str());
    }
  }
  const double tr = p.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "Tr P = " << tr;
    throw Error(ErrorKind::NotNormalized, os.str());
  }
  make_spectrum(hermitian_eigenvalues(p));  // rejects negative eigenvalues
  return {std::move(p), std::move(theta)};
}

YieldRange kinematic_bounds(const HermitianPair& hp) {
  return paired(spectrum_of(hp.p_mat), spectrum_of(hp.theta_mat));
}

double unitarity_defect(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

double yield_of(const CMatrix& u, const HermitianPair& hp) {
  if (u.rows() != hp.dim() || u.cols() != hp.dim())
    throw Error(ErrorKind::DimensionMismatch, "unitary size does not match the pair");
  const double defect = unitarity_defect(u);
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "||U^dag U - I||_F = " << defect;
    throw Error(ErrorKind::NotUnitary, os.str());
  }
  const CMatrix rho = u * hp.p_mat * u.adjoint();
  const cd j = (rho * hp.theta_mat).trace();
  if (std::abs(j.imag()) > 1e-10) {
    std::ostringstream os;
    os << "yield has imaginary part " << j.imag();
    throw Error(ErrorKind::NotHermitian, os.str());
  }
  return j.real();
}

CMatrix haar_unitary(std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "unitary dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, M_SQRT1_2);
  const auto dim = static_cast<Eigen::Index>(n);
  CMatrix z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cd(re, im);
    }
  return reorthonormalize(z);
}

AscentTrace riemannian_ascent(const HermitianPair& hp, const CMatrix& start,
                              const AscentConfig& cfg, std::uint64_t seed) {
  if (start.rows() != hp.dim() || start.cols() != hp.dim())
    throw Error(ErrorKind::DimensionMismatch, "start unitary size does not match the pair");
  if (unitarity_defect(start) > 1e-10) throw Error(ErrorKind::NotUnitary, "start is not unitary");
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0))
    throw Error(ErrorKind::InvalidArgument, "shrink must lie in (0, 1)");

  const double theta_norm = hp.theta_mat.norm();
  const double base_step = cfg.step > 0.0 ? cfg.step : (theta_norm > 0.0 ? 0.1 / theta_norm : 0.1);
  const double min_step = base_step * 1e-12;
  const double max_step = base_step * 1e6;
  constexpr double kArmijo = 1e-4;

  AscentTrace trace;
  trace.seed = seed;
  CMatrix u = start;
  CMatrix rho = u * hp.p_mat * u.adjoint();
  double j = trace_product(rho, hp.theta_mat);
  CMatrix g = hp.theta_mat * rho - rho * hp.theta_mat;
  double gn = g.norm();
  trace.yields.push_back(j);
  trace.grad_norms.push_back(gn);

  // The trial step for each iteration is a Barzilai-Borwein estimate from the
  // previous step and gradient change (falling back to growth by 1/shrink);
  // backtracking keeps every accepted step a strict Armijo increase.
  double eta = base_step;
  CMatrix g_prev;
  double eta_prev = 0.0;
  while (true) {
    if (gn < cfg.grad_tol) {
      trace.converged = true;
      break;
    }
    if (trace.iterations >= cfg.max_iter) break;

    const SkewExponential step(g);
    const bool refresh = cfg.reorthonormalize_every > 0 &&
                         (trace.iterations + 1) % cfg.reorthonormalize_every == 0;
    bool accepted = false;
    CMatrix candidate;
    double j_new = j;
    while (eta >= min_step) {
      candidate = step(eta) * u;
      if (refresh) candidate = reorthonormalize(candidate);
      j_new = raw_yield(candidate, hp);
      if (j_new >= j + kArmijo * eta * gn * gn) {
        accepted = true;
        break;
      }
      eta *= cfg.shrink;
    }
    if (!accepted) break;

    u = std::move(candidate);
    j = j_new;
    rho = u * hp.p_mat * u.adjoint();
    g_prev = std::move(g);
    eta_prev = eta;
    g = hp.theta_mat * rho - rho * hp.theta_mat;
    gn = g.norm();
    ++trace.iterations;
    trace.yields.push_back(j);
    trace.grad_norms.push_back(gn);

    // s = eta_prev * g_prev, y = g - g_prev; ascent curvature has <s, y> < 0.
    const CMatrix y = g - g_prev;
    const double sy = eta_prev * (g_prev.adjoint() * y).trace().real();
    const double yy = y.squaredNorm();
    if (sy < 0.0 && yy > 0.0) {
      eta = std::clamp(-sy / yy, min_step, max_step);
    } else {
      eta = std::min(eta / cfg.shrink, max_step);
    }
  }
  trace.final_yield = j;
  trace.final_unitary = std::move(u);
  return trace;
}

GradientCheck gradient_check(const HermitianPair& hp, const CMatrix& u, double h) {
  const CMatrix rho = u * hp.p_mat * u.adjoint();
  const CMatrix g = hp.theta_mat * rho - rho * hp.theta_mat;
  GradientCheck out;
  out.analytic = g.squaredNorm();
  const SkewExponential step(g);
  // J(h) - J(-h) with exp(+-hG) = C -+ iS expands to Tr[Theta 2i(C rho S - S rho C)];
  // evaluating it in that form avoids cancelling two O(1) yields.
  const CMatrix s = step.sine(h);
  const CMatrix c = step(h) + std::complex<double>(0.0, 1.0) * s;
  const CMatrix diff = std::complex<double>(0.0, 2.0) * (c * rho * s - s * rho * c);
  out.finite_difference = (hp.theta_mat * diff).trace().real() / (2.0 * h);
  const double scale = std::max(std::abs(out.analytic), std::numeric_limits<double>::min());
  out.relative_error = std::abs(out.finite_difference - out.analytic) / scale;
  return out;
}

std::mt19937_64 child_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

unsigned threads_from_env() {
  const char* env = std::getenv("QKB_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) return 1;
  return static_cast<unsigned>(v);
}

Certificate certify_bounds(const HermitianPair& hp, const CertifyConfig& cfg) {
  if (cfg.restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be >= 1");
  const YieldRange bounds = kinematic_bounds(hp);
  const HermitianPair negated{hp.p_mat, -hp.theta_mat};
  const auto n = static_cast<std::size_t>(hp.dim());

  const std::size_t jobs = cfg.restarts + 1;  // job 0 starts at the identity
  std::vector<AscentTrace> up(jobs);
  std::vector<AscentTrace> down(jobs);
  auto run = [&](std::size_t k) {
    CMatrix start;
    if (k == 0) {
      start = CMatrix::Identity(hp.dim(), hp.dim());
    } else {
      auto rng = child_rng(cfg.seed, k);
      start = haar_unitary(n, rng);
    }
    up[k] = riemannian_ascent(hp, start, cfg.ascent, cfg.seed);
    down[k] = riemannian_ascent(negated, start, cfg.ascent, cfg.seed);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(jobs)));
  if (threads == 1) {
    for (std::size_t k = 0; k < jobs; ++k) run(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < jobs; k += threads) run(k);
      });
    for (auto& th : pool) th.join();
  }

  Certificate c;
  c.kin_max = bounds.max;
  c.kin_min = bounds.min;
  c.attained_max = -std::numeric_limits<double>::infinity();
  c.attained_min = std::numeric_limits<double>::infinity();
  c.random_start_max = c.attained_max;
  c.random_start_min = c.attained_min;
  c.highest_seen = c.attained_max;
  c.lowest_seen = c.attained_min;
  for (std::size_t k = 0; k < jobs; ++k) {
    const double hi = up[k].final_yield;
    const double lo = -down[k].final_yield;
    c.attained_max = std::max(c.attained_max, hi);
    c.attained_min = std::min(c.attained_min, lo);
    if (k > 0) {
      c.random_start_max = std::max(c.random_start_max, hi);
      c.random_start_min = std::min(c.random_start_min, lo);
    }
    for (double y : up[k].yields) {
      c.highest_seen = std::max(c.highest_seen, y);
      c.lowest_seen = std::min(c.lowest_seen, y);
    }
    for (double y : down[k].yields) {
      c.highest_seen = std::max(c.highest_seen, -y);
      c.lowest_seen = std::min(c.lowest_seen, -y);
    }
    c.converged_runs += static_cast<std::size_t>(up[k].converged) + down[k].converged;
  }
  c.runs = 2 * jobs;

  if (cfg.haar_samples > 0) {
    auto rng = child_rng(cfg.seed, jobs);
    for (std::size_t s = 0; s < cfg.haar_samples; ++s) {
      const double y = raw_yield(haar_unitary(n, rng), hp);
      c.highest_seen = std::max(c.highest_seen, y);
      c.lowest_seen = std::min(c.lowest_seen, y);
    }
  }

  c.violation = c.highest_seen > bounds.max + 1e-9 || c.lowest_seen < bounds.min - 1e-9;
  const bool max_ok = c.attained_max >= bounds.max - 1e-6 && c.attained_max <= bounds.max + 1e-9;
  const bool min_ok = c.attained_min <= bounds.min + 1e-6 && c.attained_min >= bounds.min - 1e-9;
  c.certificate = max_ok && min_ok && !c.violation;
  if (cfg.keep_traces) {
    c.ascent_traces = std::move(up);
    c.descent_traces = std::move(down);
  }
  return c;
}

}  // namespace qkb
