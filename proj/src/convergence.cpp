#include "jiofilt/convergence.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace jio {

StatsSampler::StatsSampler(const SecondOrderStats& stats) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(stats.R.mat());
  Eigen::VectorXd lam = es.eigenvalues();
  Eigen::VectorXd sqrt_lam(lam.size());
  Eigen::VectorXd inv_sqrt_lam(lam.size());
  const double floor = 1e-14 * std::max(lam[lam.size() - 1], 0.0);
  for (Index i = 0; i < lam.size(); ++i) {
    const double l = std::max(lam[i], 0.0);
    sqrt_lam[i] = std::sqrt(l);
    inv_sqrt_lam[i] = (l > floor && l > 0.0) ? 1.0 / std::sqrt(l) : 0.0;
  }
  const CMatrix& u = es.eigenvectors();
  sqrt_r_ = u * sqrt_lam.asDiagonal() * u.adjoint();
  a_ = u * inv_sqrt_lam.asDiagonal() * u.adjoint() * stats.p;
  const double resid = stats.sigma_d2 - a_.squaredNorm();
  b_ = std::sqrt(std::max(resid, 0.0));
}

SymbolSample StatsSampler::draw(Rng& rng) const {
  const CVector z = rng.cgaussian_vector(dim());
  CVector r = sqrt_r_ * z;
  const cplx d = a_.dot(z) + b_ * rng.cgaussian();
  return {std::move(r), d};
}

OptimalPair solve_optimal_pair(const SecondOrderStats& stats, Index d) {
  const FixedPointResult fp =
      alternate_fixed_point(stats, d, identity_projection(stats.dim(), d));
  // The fixed point's projection is rank-1 (its columns are parallel to
  // R^-1 p), which would leave the reduced covariance singular and the mean
  // recursion with neutral directions. Complete the range to d dimensions
  // with Krylov directions (canonical axes as fallback); the enlarged range
  // still contains the full-rank optimum, so the pair stays MMSE-attaining.
  const Index m = stats.dim();
  CMatrix candidates(m, d + m);
  candidates.col(0) = hermitian_solve(stats.R, stats.p);
  CVector v = stats.p;
  for (Index j = 1; j < d; ++j) {
    candidates.col(j) = v;
    v = stats.R.mat() * v;
  }
  candidates.block(0, d, m, m) = CMatrix::Identity(m, m);
  Orthonormalized ortho = orthonormalize_columns(candidates, 1e-8);
  ProjectionMatrix s_opt{ortho.q.leftCols(d)};
  const ReducedDesign design = reduced_wiener(stats, s_opt);
  return {design.w_bar, std::move(s_opt)};
}

ConvergenceModel build_model(const SecondOrderStats& stats, const OptimalPair& opt,
                             const ProjectionMatrix& s_current, double mu_mean,
                             double nu_mean, double sigma_w2) {
  const Index m = stats.dim();
  const Index d = opt.S_opt.rank();
  if (opt.w_opt.size() != d || s_current.input_dim() != m || s_current.rank() != d) {
    throw std::invalid_argument("build_model: inconsistent dimensions");
  }
  if (mu_mean < 0.0 || nu_mean < 0.0 || sigma_w2 < 0.0) {
    throw std::invalid_argument("build_model: expectations must be nonnegative");
  }

  const CMatrix& r_full = stats.R.mat();
  const CMatrix r_bar = opt.S_opt.S.adjoint() * r_full * opt.S_opt.S;
  const Index n = d + m * d;

  ConvergenceModel model;
  model.m = m;
  model.d = d;
  model.mu_mean = mu_mean;
  model.nu_mean = nu_mean;
  model.sigma_w2 = sigma_w2;
  model.A = CMatrix::Zero(n, n);
  model.B = CVector::Zero(n);

  // (1,1): I_D - E[mu] R_bar; (1,2) stays zero.
  model.A.topLeftCorner(d, d) = CMatrix::Identity(d, d) - mu_mean * r_bar;

  // Unit direction of the optimal reduced filter, used to lift the coupling
  // and drift terms from matrix space into vec space.
  CVector w_dir = opt.w_opt;
  const double w_norm = w_dir.norm();
  w_dir = (w_norm > 0.0) ? CVector(w_dir / w_norm) : CVector::Zero(d);

  // (2,1): vec((E[nu] sigma_w^2 R S_opt) e_w w_dir^H) = conj(w_dir) (x) G e_w.
  const CMatrix g = nu_mean * sigma_w2 * (r_full * opt.S_opt.S);
  for (Index col = 0; col < d; ++col) {
    for (Index blk = 0; blk < d; ++blk) {
      model.A.block(d + blk * m, col, m, 1) += std::conj(w_dir[blk]) * g.col(col);
    }
  }

  // (2,2): I_{MD} - I_D (x) (E[nu] sigma_w^2 R), column-major vec convention.
  const CMatrix s_block = CMatrix::Identity(m, m) - nu_mean * sigma_w2 * r_full;
  for (Index blk = 0; blk < d; ++blk) {
    model.A.block(d + blk * m, d + blk * m, m, m) = s_block;
  }

  // Drift: the w row evaluates the gradient residual at the current S_D, the
  // S row at the optimal pair (zero at an exact fixed point).
  const CMatrix& sc = s_current.S;
  model.B.head(d) =
      mu_mean * (sc.adjoint() * (r_full * (sc * opt.w_opt)) - sc.adjoint() * stats.p);
  const CVector s_resid = nu_mean * sigma_w2 * (r_full * (opt.S_opt.S * opt.w_opt) - stats.p);
  for (Index blk = 0; blk < d; ++blk) {
    model.B.segment(d + blk * m, m) = std::conj(w_dir[blk]) * s_resid;
  }
  return model;
}

StabilityReport stability_check(const ConvergenceModel& model) {
  StabilityReport report;
  report.rho = spectral_radius(model.A);
  report.stable_mean = report.rho < 1.0;
  report.max_gain_sq = max_squared_singular_value(model.A);
  report.stable_msd = report.max_gain_sq < 1.0;
  return report;
}

PilotEstimates estimate_step_expectations(const SecondOrderStats& stats,
                                          const JioConfig& config, long n_pilot,
                                          std::uint64_t seed) {
  if (n_pilot < 1) throw std::invalid_argument("estimate_step_expectations: n_pilot >= 1");
  const StatsSampler sampler(stats);
  Rng rng(derive_seed(seed, 0x9107));
  JioState state = JioState::initial(stats.dim(), config.d, config.mu0, config.eta0,
                                     config.step_mode, config.eps);
  double mu_acc = 0.0;
  double nu_acc = 0.0;
  double w2_acc = 0.0;
  long mu_samples = 0;
  long nu_samples = 0;
  // The recursion model describes behavior near the optimum, so the sample
  // means discard the initial transient: only the second half of the pilot
  // contributes (nu(i) in particular blows up while ||w_bar|| is still
  // small).
  const long burn_in = n_pilot / 2;
  for (long i = 0; i < n_pilot; ++i) {
    const SymbolSample s = sampler.draw(rng);
    if (i >= burn_in) {
      const double r_energy = s.r.squaredNorm();
      const double w_energy = state.w_bar.squaredNorm();
      double mu_den = r_energy;
      if (config.step_mode == StepMode::projected_energy) {
        mu_den = (state.S.adjoint() * s.r).squaredNorm();
      }
      mu_acc += config.mu0 / (mu_den + config.eps);
      ++mu_samples;
      if (std::sqrt(w_energy) >= config.eps) {
        nu_acc += config.eta0 / (w_energy * r_energy + config.eps);
        ++nu_samples;
      }
      w2_acc += w_energy;
    }
    state.update(s);
  }
  PilotEstimates out;
  out.mu_mean = (mu_samples > 0) ? mu_acc / static_cast<double>(mu_samples) : 0.0;
  out.nu_mean = (nu_samples > 0) ? nu_acc / static_cast<double>(nu_samples) : 0.0;
  out.sigma_w2 = (mu_samples > 0) ? w2_acc / static_cast<double>(mu_samples) : 0.0;
  return out;
}

double aligned_projection_error(const CMatrix& s, const CMatrix& s_ref) {
  // min_T ||S T - S_ref||_F via the normal equations with a pseudo-inverse,
  // tolerant of rank-deficient iterates.
  const CMatrix t = pinv_rank_limited(s, 1e-12) * s_ref;
  return (s * t - s_ref).norm();
}

ErrorTrace empirical_error_trace(const SecondOrderStats& stats, const OptimalPair& opt,
                                 const JioConfig& config, long n_symbols, int n_runs,
                                 std::uint64_t seed) {
  if (n_runs < 1) throw std::invalid_argument("empirical_error_trace: n_runs must be >= 1");
  if (n_symbols < 1) throw std::invalid_argument("empirical_error_trace: n_symbols >= 1");
  const StatsSampler sampler(stats);
  ErrorTrace trace;
  trace.total_runs = n_runs;
  std::vector<double> w_sum(n_symbols, 0.0);
  std::vector<double> s_sum(n_symbols, 0.0);
  int completed = 0;
  for (int run = 0; run < n_runs; ++run) {
    Rng rng(derive_seed(seed, 0xE5A0 + static_cast<std::uint64_t>(run)));
    JioState state = JioState::initial(stats.dim(), config.d, config.mu0, config.eta0,
                                       config.step_mode, config.eps);
    std::vector<double> w_run(n_symbols, 0.0);
    std::vector<double> s_run(n_symbols, 0.0);
    bool diverged = false;
    for (long i = 0; i < n_symbols; ++i) {
      try {
        state.update(sampler.draw(rng));
      } catch (const DivergenceError&) {
        diverged = true;
        break;
      }
      w_run[i] = (state.w_bar - opt.w_opt).norm();
      s_run[i] = aligned_projection_error(state.S, opt.S_opt.S);
    }
    if (diverged) {
      ++trace.diverged_runs;
      continue;
    }
    for (long i = 0; i < n_symbols; ++i) {
      w_sum[i] += w_run[i];
      s_sum[i] += s_run[i];
    }
    ++completed;
  }
  trace.w_err.resize(n_symbols, 0.0);
  trace.s_err.resize(n_symbols, 0.0);
  if (completed > 0) {
    for (long i = 0; i < n_symbols; ++i) {
      trace.w_err[i] = w_sum[i] / completed;
      trace.s_err[i] = s_sum[i] / completed;
    }
  }
  return trace;
}

double mann_kendall_z(const std::vector<double>& series) {
  const long n = static_cast<long>(series.size());
  if (n < 3) return 0.0;
  long s = 0;
  for (long i = 0; i < n - 1; ++i) {
    for (long j = i + 1; j < n; ++j) {
      const double diff = series[j] - series[i];
      if (diff > 0) ++s;
      else if (diff < 0) --s;
    }
  }
  const double var = static_cast<double>(n) * (n - 1) * (2.0 * n + 5.0) / 18.0;
  if (var <= 0.0) return 0.0;
  double z = 0.0;
  if (s > 0) z = (s - 1) / std::sqrt(var);
  else if (s < 0) z = (s + 1) / std::sqrt(var);
  return z;
}

bool has_decreasing_trend(const std::vector<double>& series, double alpha) {
  // Normal quantile for the common one-sided levels; 5% by default.
  double z_crit = 1.6449;
  if (alpha <= 0.011) z_crit = 2.3263;
  else if (alpha <= 0.026) z_crit = 1.9600;
  return mann_kendall_z(series) < -z_crit;
}

}  // namespace jio
