#pragma once

#include <vector>

#include <Eigen/Dense>

namespace qkb {

using CMatrix = Eigen::MatrixXcd;

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
struct EigenSystem {
  std::vector<double> values;
  CMatrix vectors;
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Sweeps until the
/// off-diagonal Frobenius norm is below 1e-12 * ||A||_F.
/// Throws NotHermitian when ||A - A^dag||_F > 1e-10.
EigenSystem hermitian_eigensystem(const CMatrix& a);

std::vector<double> hermitian_eigenvalues(const CMatrix& a);

/// exp(eta * G) for anti-Hermitian G, evaluated through the spectral
/// decomposition of the Hermitian matrix iG. The decomposition is computed
/// once and reused for every eta, so line searches cost one product each.
class SkewExponential {
 public:
  explicit SkewExponential(const CMatrix& generator);

  CMatrix operator()(double eta) const;

  /// Hermitian sine part S(eta) = V diag(sin(eta lambda)) V^dag, so that
  /// exp(eta G) = C(eta) - i S(eta). Exact to relative precision for small eta.
  CMatrix sine(double eta) const;

 private:
  EigenSystem eig_;
};

}  // namespace qkb
