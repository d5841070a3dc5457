#include "jiofilt/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace jio {

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

HermitianMatrix::HermitianMatrix(CMatrix m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("HermitianMatrix: matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!all_finite(m)) {
    throw std::invalid_argument("HermitianMatrix: non-finite entries");
  }
  const double scale = max_abs(m);
  const double asym = max_abs(m - m.adjoint());
  if (asym > 1e-10 * std::max(scale, 1e-300)) {
    throw std::invalid_argument("HermitianMatrix: input is not Hermitian (max asymmetry " +
                                std::to_string(asym) + ")");
  }
  // Make the stored matrix exactly Hermitian so downstream solvers see a
  // consistent adjoint.
  m_ = 0.5 * (m + m.adjoint().eval());
}

HermitianMatrix HermitianMatrix::symmetrized(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("HermitianMatrix::symmetrized: matrix must be square");
  }
  return HermitianMatrix(0.5 * (m + m.adjoint().eval()));
}

Eigen::VectorXd hermitian_eigenvalues(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

namespace {

// Shared core: choose the ridge per the smallest-eigenvalue rule, then LDLT.
template <typename Rhs>
auto solve_with_ridge(const HermitianMatrix& a, const Rhs& b) {
  const Index n = a.dim();
  const double eps_reg = 1e-10 * a.trace_real() / static_cast<double>(n);
  const Eigen::VectorXd evals = hermitian_eigenvalues(a);
  CMatrix sys = a.mat();
  if (evals[0] < eps_reg) {
    sys += eps_reg * CMatrix::Identity(n, n);
  }
  Eigen::LDLT<CMatrix> ldlt(sys);
  return ldlt.solve(b).eval();
}

}  // namespace

CVector hermitian_solve(const HermitianMatrix& a, const CVector& b) {
  if (b.size() != a.dim()) {
    throw std::invalid_argument("hermitian_solve: dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.size()) + ")");
  }
  return solve_with_ridge(a, b);
}

CMatrix hermitian_solve(const HermitianMatrix& a, const CMatrix& b) {
  if (b.rows() != a.dim()) {
    throw std::invalid_argument("hermitian_solve: dimension mismatch");
  }
  return solve_with_ridge(a, b);
}

double spectral_radius(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("spectral_radius: matrix must be square");
  }
  if (a.rows() == 0) return 0.0;
  Eigen::ComplexSchur<CMatrix> schur(a, /*computeU=*/false);
  return schur.matrixT().diagonal().cwiseAbs().maxCoeff();
}

double max_squared_singular_value(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  const double smax = svd.singularValues()[0];
  return smax * smax;
}

CMatrix pinv_rank_limited(const CMatrix& a, double tol) {
  if (tol <= 0.0) {
    throw std::invalid_argument("pinv_rank_limited: tol must be positive");
  }
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0) return CMatrix::Zero(a.cols(), a.rows());
  const double cutoff = tol * sv[0];
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) inv[i] = 1.0 / sv[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Orthonormalized orthonormalize_columns(const CMatrix& a, double tol) {
  Orthonormalized out;
  const Index rows = a.rows();
  const Index cols = a.cols();
  CMatrix q(rows, cols);
  Index kept = 0;
  for (Index j = 0; j < cols; ++j) {
    CVector v = a.col(j);
    const double original = v.norm();
    // Two projection passes keep the result orthonormal to ~1e-15 even for
    // nearly dependent Krylov columns.
    for (int pass = 0; pass < 2; ++pass) {
      for (Index k = 0; k < kept; ++k) {
        v -= q.col(k).dot(v) * q.col(k);
      }
    }
    const double resid = v.norm();
    if (original <= 0.0 || resid < tol * original) {
      out.dropped.push_back(j);
      continue;
    }
    q.col(kept++) = v / resid;
  }
  if (kept == 0) {
    throw std::invalid_argument("orthonormalize_columns: all columns degenerate");
  }
  out.q = q.leftCols(kept);
  return out;
}

CMatrix hermitian_sqrt(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.mat());
  Eigen::VectorXd lam = es.eigenvalues();
  for (Index i = 0; i < lam.size(); ++i) lam[i] = std::sqrt(std::max(lam[i], 0.0));
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace jio
