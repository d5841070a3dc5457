#ifndef JIOFILT_CONVERGENCE_HPP
#define JIOFILT_CONVERGENCE_HPP

#include <vector>

#include "jiofilt/adaptive.hpp"
#include "jiofilt/mmse.hpp"
#include "jiofilt/rng.hpp"
#include "jiofilt/types.hpp"

namespace jio {

/// Draws (d, r) pairs whose exact second-order statistics equal the given
/// stats: r = R^{1/2} z, d = a^H z + b u with z, u circular Gaussian.
class StatsSampler {
 public:
  explicit StatsSampler(const SecondOrderStats& stats);

  SymbolSample draw(Rng& rng) const;
  Index dim() const { return sqrt_r_.rows(); }

 private:
  CMatrix sqrt_r_;
  CVector a_;
  double b_;
};

/// Optimal parameter pair the mean-error recursion contracts toward.
struct OptimalPair {
  CVector w_opt;
  ProjectionMatrix S_opt;
};

/// Computes the pair via the batch fixed point from the standard init. The
/// fixed point's rank-1 range is completed to d dimensions so the reduced
/// covariance, and with it the recursion model, is full rank; the completed
/// range still satisfies the range condition.
OptimalPair solve_optimal_pair(const SecondOrderStats& stats, Index d);

/// Mean-error recursion model e(i+1) = A e(i) + B over the stacked error
/// space [e_w (D); vec(e_S) (M*D)]. A is block lower triangular: the w-block
/// is I - E[mu] R_bar, the S-block is the Kronecker lift of
/// I - E[nu] sigma_w^2 R, and the coupling block maps the w error into the
/// S error space along the optimal reduced-filter direction.
struct ConvergenceModel {
  CMatrix A;
  CVector B;
  double mu_mean = 0.0;
  double nu_mean = 0.0;
  double sigma_w2 = 0.0;
  Index m = 0;
  Index d = 0;
};

ConvergenceModel build_model(const SecondOrderStats& stats, const OptimalPair& opt,
                             const ProjectionMatrix& s_current, double mu_mean,
                             double nu_mean, double sigma_w2);

struct StabilityReport {
  double rho = 0.0;           // spectral radius of A
  bool stable_mean = false;   // rho < 1
  double max_gain_sq = 0.0;   // largest eigenvalue of A^H A
  bool stable_msd = false;    // max_gain_sq < 1 (sufficient condition)
};

StabilityReport stability_check(const ConvergenceModel& model);

struct JioConfig {
  Index d = 4;
  double mu0 = 0.5;
  double eta0 = 0.5;
  StepMode step_mode = StepMode::full_energy;
  double eps = 1e-12;
};

/// Sample-mean estimates of E[mu(i)], E[nu(i)] and sigma_w^2 from the second
/// half of a pilot adaptation run (the transient, where nu(i) is inflated by
/// the small initial ||w_bar||, is discarded); the recursion model treats
/// them as known expectations.
struct PilotEstimates {
  double mu_mean = 0.0;
  double nu_mean = 0.0;
  double sigma_w2 = 0.0;
};

PilotEstimates estimate_step_expectations(const SecondOrderStats& stats,
                                          const JioConfig& config, long n_pilot,
                                          std::uint64_t seed);

/// Mean error-norm trajectories of the adaptive scheme against the optimal
/// pair. The S error is measured after aligning S(i) to S_opt by the
/// least-squares D x D transform, since the optimal projection is only
/// determined up to its range.
struct ErrorTrace {
  std::vector<double> w_err;  // mean ||w_bar(i) - w_opt|| over completed runs
  std::vector<double> s_err;  // mean aligned ||S(i) T - S_opt||_F
  int diverged_runs = 0;
  int total_runs = 0;
};

ErrorTrace empirical_error_trace(const SecondOrderStats& stats, const OptimalPair& opt,
                                 const JioConfig& config, long n_symbols, int n_runs,
                                 std::uint64_t seed);

/// Least-squares alignment residual min_T ||S T - S_ref||_F.
double aligned_projection_error(const CMatrix& s, const CMatrix& s_ref);

/// Mann-Kendall trend statistic (normal approximation); negative z means a
/// decreasing trend.
double mann_kendall_z(const std::vector<double>& series);

/// One-sided test for a decreasing trend at the given significance level.
bool has_decreasing_trend(const std::vector<double>& series, double alpha = 0.05);

}  // namespace jio

#endif  // JIOFILT_CONVERGENCE_HPP
