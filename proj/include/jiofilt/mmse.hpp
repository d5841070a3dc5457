#ifndef JIOFILT_MMSE_HPP
#define JIOFILT_MMSE_HPP

#include <vector>

#include "jiofilt/linalg.hpp"
#include "jiofilt/types.hpp"

namespace jio {

/// Known second-order statistics of the estimation problem: covariance R of
/// the observation, cross-correlation p = E[d* r], and the desired-signal
/// power sigma_d^2. Validated PSD on construction.
struct SecondOrderStats {
  SecondOrderStats(HermitianMatrix R_in, CVector p_in, double sigma_d2_in);

  Index dim() const { return R.dim(); }

  HermitianMatrix R;
  CVector p;
  double sigma_d2;
};

/// M x D dimensionality-reduction operator. Columns are the bank of
/// full-length filters; each must carry nonzero energy.
struct ProjectionMatrix {
  explicit ProjectionMatrix(CMatrix S_in);

  Index input_dim() const { return S.rows(); }   // M
  Index rank() const { return S.cols(); }        // D

  CMatrix S;
};

/// The [I_D 0]^T initialization used by the adaptive scheme and the batch
/// fixed point alike.
ProjectionMatrix identity_projection(Index m, Index d);

struct FullRankDesign {
  CVector w;
  double mmse;
};

/// w = R^-1 p, mmse = sigma_d^2 - p^H R^-1 p.
FullRankDesign full_rank_wiener(const SecondOrderStats& stats);

/// Maps (R, p) through S: returns (S^H R S, S^H p, sigma_d^2).
SecondOrderStats reduce_stats(const SecondOrderStats& stats, const ProjectionMatrix& s);

struct ReducedDesign {
  ProjectionMatrix S;
  CVector w_bar;
  double mmse;
};

enum class RankPolicy {
  require_full_rank,  // rank-deficient S is an error naming the bad columns
  allow_deficient,    // solve through the ridge; used inside the fixed point,
                      // whose projection iterates are rank-1 by construction
};

/// Reduced-rank Wiener design for a fixed projection: w_bar solves
/// (S^H R S) w_bar = S^H p; mmse is the cost evaluated at that w_bar.
ReducedDesign reduced_wiener(const SecondOrderStats& stats, const ProjectionMatrix& s,
                             RankPolicy policy = RankPolicy::require_full_rank);

/// Range-only evaluation of the reduced MMSE: orthonormalizes S first so the
/// value depends only on range(S) and stays stable for ill-conditioned bases.
double reduced_mmse(const SecondOrderStats& stats, const ProjectionMatrix& s);

/// Which solution of the S-block stationarity condition R S (w w^H) = p w^H
/// to return.
enum class ProjectionForm {
  min_norm,  // multiply by the pseudo-inverse of the rank-1 weight Gram
             // matrix: S = R^-1 p w^H / ||w||^2 (the minimum-norm solution)
  scaled,    // multiply by the weight Gram matrix directly:
             // S = R^-1 p w^H ||w||^2 (same range, different scale)
};

/// Optimal projection for a fixed reduced filter w_bar. Throws when w_bar is
/// numerically zero, since the update direction vanishes there.
ProjectionMatrix optimal_projection(const SecondOrderStats& stats, const CVector& w_bar,
                                    ProjectionForm form = ProjectionForm::min_norm);

struct FixedPointResult {
  ReducedDesign design;
  std::vector<double> mmse_trace;  // one entry per completed iteration
  int iterations = 0;
  bool converged = false;
};

/// Alternates reduced_wiener and optimal_projection from the given
/// initialization until |delta mmse| < tol or max_iters.
FixedPointResult alternate_fixed_point(const SecondOrderStats& stats, Index d,
                                       const ProjectionMatrix& init, int max_iters = 200,
                                       double tol = 1e-10,
                                       ProjectionForm form = ProjectionForm::min_norm);

/// Projection whose range is the order-d Krylov subspace span{p, Rp, ...},
/// orthonormalized. Degenerate directions are dropped and reported through
/// `dropped` when provided, so the returned rank can be < d.
ProjectionMatrix krylov_projection(const SecondOrderStats& stats, Index d,
                                   std::vector<Index>* dropped = nullptr);

/// Low-level Krylov basis builder shared with the adaptive surrogate; no
/// stats validation.
CMatrix krylov_basis(const CMatrix& r, const CVector& p, Index d,
                     std::vector<Index>* dropped = nullptr);

struct RangeCondition {
  bool holds;       // the full-rank optimum lies in range(S)
  double mmse_gap;  // reduced mmse - full-rank mmse (>= 0 up to roundoff)
};

/// Tests whether projecting through S preserves the attainable MMSE.
RangeCondition range_condition(const SecondOrderStats& stats, const ProjectionMatrix& s);

}  // namespace jio

#endif  // JIOFILT_MMSE_HPP
