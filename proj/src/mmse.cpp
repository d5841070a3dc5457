#include "jiofilt/mmse.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace jio {

namespace {

constexpr double kRankTol = 1e-10;

// Cost function of the reduced design at an arbitrary weight vector,
// J = sigma_d^2 - 2 Re(w^H p_bar) + w^H R_bar w. Evaluating the full
// quadratic keeps reported mmse honest when w_bar came through a ridge.
double reduced_cost(const SecondOrderStats& reduced, const CVector& w_bar) {
  const double quad = (w_bar.adjoint() * reduced.R.mat() * w_bar)(0).real();
  const double cross = 2.0 * w_bar.dot(reduced.p).real();
  return reduced.sigma_d2 - cross + quad;
}

}  // namespace

SecondOrderStats::SecondOrderStats(HermitianMatrix R_in, CVector p_in, double sigma_d2_in)
    : R(std::move(R_in)), p(std::move(p_in)), sigma_d2(sigma_d2_in) {
  if (p.size() != R.dim()) {
    throw std::invalid_argument("SecondOrderStats: p length must equal dim(R)");
  }
  if (!all_finite(p)) {
    throw std::invalid_argument("SecondOrderStats: non-finite p");
  }
  if (!(sigma_d2 > 0.0)) {
    throw std::invalid_argument("SecondOrderStats: sigma_d2 must be positive");
  }
  const Eigen::VectorXd evals = hermitian_eigenvalues(R);
  const double lam_max = std::max(evals[evals.size() - 1], 0.0);
  if (evals[0] < -1e-10 * std::max(lam_max, 1e-300)) {
    throw std::invalid_argument("SecondOrderStats: R is not PSD (min eigenvalue " +
                                std::to_string(evals[0]) + ")");
  }
  const CVector w = hermitian_solve(R, p);
  const double full_mmse = sigma_d2 - p.dot(w).real();
  if (full_mmse < -1e-9) {
    throw std::invalid_argument("SecondOrderStats: inconsistent stats, full MMSE " +
                                std::to_string(full_mmse) + " < 0");
  }
}

ProjectionMatrix::ProjectionMatrix(CMatrix S_in) : S(std::move(S_in)) {
  if (S.cols() < 1 || S.cols() > S.rows()) {
    throw std::invalid_argument("ProjectionMatrix: need 1 <= D <= M, got M=" +
                                std::to_string(S.rows()) + " D=" + std::to_string(S.cols()));
  }
  if (!all_finite(S)) {
    throw std::invalid_argument("ProjectionMatrix: non-finite entries");
  }
  for (Index j = 0; j < S.cols(); ++j) {
    if (S.col(j).norm() <= 0.0) {
      throw std::invalid_argument("ProjectionMatrix: column " + std::to_string(j) +
                                  " carries no energy");
    }
  }
}

ProjectionMatrix identity_projection(Index m, Index d) {
  if (d < 1 || d > m) {
    throw std::invalid_argument("identity_projection: need 1 <= D <= M");
  }
  CMatrix s = CMatrix::Zero(m, d);
  s.topRows(d) = CMatrix::Identity(d, d);
  return ProjectionMatrix(std::move(s));
}

FullRankDesign full_rank_wiener(const SecondOrderStats& stats) {
  CVector w = hermitian_solve(stats.R, stats.p);
  if (!all_finite(w)) {
    throw std::runtime_error("full_rank_wiener: singular covariance beyond ridge recovery");
  }
  double mmse = stats.sigma_d2 - stats.p.dot(w).real();
  // Clip roundoff excursions outside [0, sigma_d^2].
  mmse = std::min(std::max(mmse, 0.0), stats.sigma_d2);
  return {std::move(w), mmse};
}

SecondOrderStats reduce_stats(const SecondOrderStats& stats, const ProjectionMatrix& s) {
  if (s.input_dim() != stats.dim()) {
    throw std::invalid_argument("reduce_stats: projection rows must equal dim(R)");
  }
  const CMatrix r_bar = s.S.adjoint() * stats.R.mat() * s.S;
  CVector p_bar = s.S.adjoint() * stats.p;
  return SecondOrderStats(HermitianMatrix::symmetrized(r_bar), std::move(p_bar),
                          stats.sigma_d2);
}

ReducedDesign reduced_wiener(const SecondOrderStats& stats, const ProjectionMatrix& s,
                             RankPolicy policy) {
  if (policy == RankPolicy::require_full_rank) {
    Orthonormalized ortho = orthonormalize_columns(s.S, kRankTol);
    if (!ortho.dropped.empty()) {
      std::ostringstream msg;
      msg << "reduced_wiener: projection is rank-deficient; dependent columns:";
      for (Index j : ortho.dropped) msg << ' ' << j;
      throw std::invalid_argument(msg.str());
    }
  }
  SecondOrderStats reduced = reduce_stats(stats, s);
  CVector w_bar = hermitian_solve(reduced.R, reduced.p);
  const double mmse = reduced_cost(reduced, w_bar);
  return {s, std::move(w_bar), mmse};
}

double reduced_mmse(const SecondOrderStats& stats, const ProjectionMatrix& s) {
  if (s.input_dim() != stats.dim()) {
    throw std::invalid_argument("reduced_mmse: dimension mismatch");
  }
  // Orthonormal basis of range(S) makes the value basis-independent.
  Orthonormalized ortho = orthonormalize_columns(s.S, kRankTol);
  ProjectionMatrix q{ortho.q};
  SecondOrderStats reduced = reduce_stats(stats, q);
  const CVector w_bar = hermitian_solve(reduced.R, reduced.p);
  return reduced_cost(reduced, w_bar);
}

ProjectionMatrix optimal_projection(const SecondOrderStats& stats, const CVector& w_bar,
                                    ProjectionForm form) {
  const double w_norm2 = w_bar.squaredNorm();
  if (!(w_norm2 > 1e-24)) {
    throw std::invalid_argument(
        "optimal_projection: w_bar is numerically zero; the projection update has no "
        "direction (initialization must not annihilate the signal)");
  }
  const CVector x = hermitian_solve(stats.R, stats.p);  // R^-1 p
  const double scale = (form == ProjectionForm::min_norm) ? 1.0 / w_norm2 : w_norm2;
  CMatrix s = scale * (x * w_bar.adjoint());
  return ProjectionMatrix(std::move(s));
}

FixedPointResult alternate_fixed_point(const SecondOrderStats& stats, Index d,
                                       const ProjectionMatrix& init, int max_iters,
                                       double tol, ProjectionForm form) {
  if (max_iters < 1) {
    throw std::invalid_argument("alternate_fixed_point: max_iters must be >= 1");
  }
  if (init.input_dim() != stats.dim() || init.rank() != d) {
    throw std::invalid_argument("alternate_fixed_point: init has wrong shape");
  }
  FixedPointResult out{ReducedDesign{init, CVector::Zero(d), stats.sigma_d2}, {}, 0, false};
  ProjectionMatrix s = init;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    // After the first iteration the projection iterate is rank-1 (every
    // column is parallel to R^-1 p), so the deficient-rank path is the
    // expected one.
    ReducedDesign design = reduced_wiener(stats, s, RankPolicy::allow_deficient);
    out.mmse_trace.push_back(design.mmse);
    out.design = design;
    out.iterations = it + 1;
    if (std::abs(prev - design.mmse) < tol) {
      out.converged = true;
      break;
    }
    prev = design.mmse;
    s = optimal_projection(stats, design.w_bar, form);
  }
  return out;
}

CMatrix krylov_basis(const CMatrix& r, const CVector& p, Index d,
                     std::vector<Index>* dropped) {
  if (p.norm() <= 0.0) {
    throw std::invalid_argument("krylov_basis: p is zero; Krylov subspace is empty");
  }
  CMatrix cols(p.size(), d);
  CVector v = p;
  for (Index j = 0; j < d; ++j) {
    cols.col(j) = v;
    if (j + 1 < d) v = r * v;
  }
  Orthonormalized ortho = orthonormalize_columns(cols, 1e-8);
  if (dropped != nullptr) *dropped = ortho.dropped;
  return ortho.q;
}

ProjectionMatrix krylov_projection(const SecondOrderStats& stats, Index d,
                                   std::vector<Index>* dropped) {
  if (d < 1 || d > stats.dim()) {
    throw std::invalid_argument("krylov_projection: need 1 <= D <= M");
  }
  return ProjectionMatrix(krylov_basis(stats.R.mat(), stats.p, d, dropped));
}

RangeCondition range_condition(const SecondOrderStats& stats, const ProjectionMatrix& s) {
  const FullRankDesign full = full_rank_wiener(stats);
  Orthonormalized ortho = orthonormalize_columns(s.S, kRankTol);
  const CVector within = ortho.q * (ortho.q.adjoint() * full.w);
  const double resid = (full.w - within).norm();
  const bool holds = resid <= 1e-8 * std::max(full.w.norm(), 1e-300);
  const double gap = reduced_mmse(stats, s) - full.mmse;
  return {holds, gap};
}

}  // namespace jio
