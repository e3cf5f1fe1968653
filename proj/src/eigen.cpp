#include "qkb/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include "qkb/error.hpp"

namespace qkb {
namespace {

using cd = std::complex<double>;

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Zeroes a(p, q) with the unitary G = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
// acting on rows/columns p and q: a <- G^dag a G, v <- v G.
void rotate(CMatrix& a, CMatrix& v, Eigen::Index p, Eigen::Index q) {
  const cd apq = a(p, q);
  const double mag = std::abs(apq);
  const cd phase = apq / mag;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double tau = (aqq - app) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const cd g_pp = c;
  const cd g_pq = s;
  const cd g_qp = -s * std::conj(phase);
  const cd g_qq = c * std::conj(phase);

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd akp = a(k, p);
    const cd akq = a(k, q);
    a(k, p) = akp * g_pp + akq * g_qp;
    a(k, q) = akp * g_pq + akq * g_qq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd apk = a(p, k);
    const cd aqk = a(q, k);
    a(p, k) = std::conj(g_pp) * apk + std::conj(g_qp) * aqk;
    a(q, k) = std::conj(g_pq) * apk + std::conj(g_qq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * mag;
  a(q, q) = aqq + t * mag;

  for (Eigen::Index k = 0; k < n; ++k) {
    const cd vkp = v(k, p);
    const cd vkq = v(k, q);
    v(k, p) = vkp * g_pp + vkq * g_qp;
    v(k, q) = vkp * g_pq + vkq * g_qq;
  }
}

}  // namespace

EigenSystem hermitian_eigensystem(const CMatrix& input) {
  if (input.rows() != input.cols())
    throw Error(ErrorKind::NotHermitian, "matrix is not square");
  const double asym = (input - input.adjoint()).norm();
  if (asym > 1e-10) {
    std::ostringstream os;
    os << "||A - A^dag||_F = " << asym;
    throw Error(ErrorKind::NotHermitian, os.str());
  }
  const Eigen::Index n = input.rows();
  CMatrix a = 0.5 * (input + input.adjoint());
  CMatrix v = CMatrix::Identity(n, n);
  const double target = 1e-12 * a.norm();

  for (int sweep = 0; sweep < 100 && off_diagonal_norm(a) > target; ++sweep) {
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q)
        if (std::abs(a(p, q)) > 0.0) rotate(a, v, p, q);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() < a(y, y).real();
  });
  EigenSystem out;
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values.push_back(a(order[k], order[k]).real());
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const CMatrix& a) {
  return hermitian_eigensystem(a).values;
}

SkewExponential::SkewExponential(const CMatrix& generator)
    : eig_(hermitian_eigensystem(cd(0.0, 1.0) * generator)) {}

CMatrix SkewExponential::operator()(double eta) const {
  // G = -i V diag(lambda) V^dag, so exp(eta G) = V diag(e^{-i eta lambda}) V^dag.
  const Eigen::Index n = eig_.vectors.rows();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::polar(1.0, -eta * eig_.values[k]);
  return eig_.vectors * phases.asDiagonal() * eig_.vectors.adjoint();
}

CMatrix SkewExponential::sine(double eta) const {
  const Eigen::Index n = eig_.vectors.rows();
  Eigen::VectorXcd s(n);
  for (Eigen::Index k = 0; k < n; ++k) s(k) = std::sin(eta * eig_.values[k]);
  return eig_.vectors * s.asDiagonal() * eig_.vectors.adjoint();
}

}  // namespace qkb
