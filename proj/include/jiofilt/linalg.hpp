#ifndef JIOFILT_LINALG_HPP
#define JIOFILT_LINALG_HPP

#include <vector>

#include "jiofilt/types.hpp"

namespace jio {

/// Square complex matrix checked Hermitian on construction:
/// max|X - X^H| must not exceed 1e-10 * max|X|.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(CMatrix m);

  /// Builds from 0.5*(m + m^H); for sample covariances whose asymmetry is
  /// pure roundoff.
  static HermitianMatrix symmetrized(const CMatrix& m);

  const CMatrix& mat() const { return m_; }
  Index dim() const { return m_.rows(); }
  double trace_real() const { return m_.trace().real(); }

 private:
  HermitianMatrix() = default;
  CMatrix m_;
};

/// Solves A x = b for Hermitian A. A ridge eps_reg = 1e-10 * trace(A)/dim
/// is added only when the smallest eigenvalue falls below it, so
/// rank-deficient sample covariances stay solvable.
CVector hermitian_solve(const HermitianMatrix& a, const CVector& b);

/// Multi-RHS variant of hermitian_solve.
CMatrix hermitian_solve(const HermitianMatrix& a, const CMatrix& b);

/// Largest |eigenvalue| of a square matrix.
double spectral_radius(const CMatrix& a);

/// Largest eigenvalue of A^H A (squared largest singular value).
double max_squared_singular_value(const CMatrix& a);

/// Moore-Penrose pseudo-inverse; singular values below tol * sigma_max are
/// treated as zero.
CMatrix pinv_rank_limited(const CMatrix& a, double tol);

struct Orthonormalized {
  CMatrix q;                    // orthonormal columns spanning range of input
  std::vector<Index> dropped;   // input columns removed as degenerate
};

/// Gram-Schmidt with one reorthogonalization pass. Columns whose residual
/// falls below tol relative to their original norm are dropped and reported.
/// Throws if every column degenerates.
Orthonormalized orthonormalize_columns(const CMatrix& a, double tol);

/// Hermitian square root R^{1/2} via eigendecomposition; eigenvalues clipped
/// at zero. Used to sample Gaussian data with a prescribed covariance.
CMatrix hermitian_sqrt(const HermitianMatrix& a);

/// Eigenvalues of a Hermitian matrix in ascending order.
Eigen::VectorXd hermitian_eigenvalues(const HermitianMatrix& a);

}  // namespace jio

#endif  // JIOFILT_LINALG_HPP
