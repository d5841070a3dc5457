#ifndef JIOFILT_ADAPTIVE_HPP
#define JIOFILT_ADAPTIVE_HPP

#include <concepts>
#include <vector>

#include "jiofilt/linalg.hpp"
#include "jiofilt/ops.hpp"
#include "jiofilt/types.hpp"

namespace jio {

/// One training/adaptation sample: received vector and reference symbol.
struct SymbolSample {
  CVector r;
  cplx d;
};

/// Normalization of the reduced-filter step size.
enum class StepMode {
  full_energy,       // mu(i) = mu0 / (r^H r + eps)
  projected_energy,  // mu(i) = mu0 / (rbar^H rbar + eps); at mu0 = 1 the
                     // a-posteriori error vanishes exactly
};

/// Jointly adapted projection bank S (M x D) and reduced filter w_bar (D).
/// Both NLMS updates consume the same pre-update error; the projection step
/// is skipped while ||w_bar|| < eps since its direction vanishes there.
struct JioState {
  CMatrix S;
  CVector w_bar;
  double mu0 = 0.5;
  double eta0 = 0.5;
  double eps = 1e-12;
  StepMode step_mode = StepMode::full_energy;
  int inner_iterations = 1;  // NLMS passes per symbol; default one
  long iteration = 0;

  /// Standard initialization: w_bar = 0, S = [I_D 0]^T.
  static JioState initial(Index m, Index d, double mu0 = 0.5, double eta0 = 0.5,
                          StepMode mode = StepMode::full_energy, double eps = 1e-12);

  Index input_dim() const { return S.rows(); }
  Index rank() const { return S.cols(); }

  /// x(i) = w_bar^H S^H r.
  cplx output(const CVector& r) const;

  /// Effective full-length filter S * w_bar.
  CVector effective_filter() const { return S * w_bar; }

  /// Applies the joint NLMS step; returns the a-priori error e(i).
  cplx update(const SymbolSample& sample);
};

/// Instrumented variant; identical arithmetic, returns the op tally.
OpCount jio_update_counted(JioState& state, const SymbolSample& sample);

struct FullRankNlmsState {
  CVector w;
  double mu0 = 0.3;
  double eps = 1e-12;
  long iteration = 0;

  static FullRankNlmsState initial(Index m, double mu0 = 0.3, double eps = 1e-12);

  cplx output(const CVector& r) const { return w.dot(r); }
  cplx update(const SymbolSample& sample);
};

OpCount fullrank_nlms_update_counted(FullRankNlmsState& state, const SymbolSample& sample);

/// Exponentially weighted RLS with inverse-covariance estimate P,
/// re-symmetrized after every update.
struct FullRankRlsState {
  CVector w;
  CMatrix P;
  double lambda = 0.998;
  long iteration = 0;

  /// P(0) = I/delta. The default delta follows 1e-2 * (mean input power).
  static FullRankRlsState initial(Index m, double lambda = 0.998, double delta = 1e-2);

  cplx output(const CVector& r) const { return w.dot(r); }
  cplx update(const SymbolSample& sample);
};

OpCount fullrank_rls_update_counted(FullRankRlsState& state, const SymbolSample& sample);

/// Adaptive Krylov-subspace baseline: running sample estimates of (R, p),
/// a projection rebuilt periodically from their Krylov basis, and an NLMS
/// reduced filter on the projected data. This is a sample-statistics
/// surrogate of the multistage Wiener filter, and is labeled as such in
/// experiment outputs.
struct MwfNlmsState {
  CMatrix R_hat;
  CVector p_hat;
  CMatrix S;
  CVector w_bar;
  double forget = 0.998;
  int rebuild_every = 25;
  double mu0 = 0.5;
  double eps = 1e-12;
  Index target_rank = 1;
  long iteration = 0;

  static MwfNlmsState initial(Index m, Index d, double mu0 = 0.5, double forget = 0.998,
                              int rebuild_every = 25);

  cplx output(const CVector& r) const { return w_bar.dot(S.adjoint() * r); }
  CVector effective_filter() const { return S * w_bar; }
  cplx update(const SymbolSample& sample);
};

/// Instrumented variant measured on a rebuild symbol (the worst case).
OpCount mwf_update_counted(MwfNlmsState& state, const SymbolSample& sample);

template <typename F>
concept AdaptiveFilter = requires(F f, const CVector& r, const SymbolSample& s) {
  { f.output(r) } -> std::convertible_to<cplx>;
  { f.update(s) } -> std::convertible_to<cplx>;
};

struct DecisionDirectedTrace {
  std::vector<cplx> estimates;  // pre-decision outputs x(i)
  std::vector<cplx> targets;    // reference used for the update (true or sliced)
  std::vector<cplx> errors;     // a-priori errors returned by update
};

inline cplx bpsk_slice(cplx x) { return (x.real() >= 0.0) ? cplx(1.0, 0.0) : cplx(-1.0, 0.0); }

/// Trains on the true symbols for the first n_train samples, then switches
/// the update target to the BPSK decision on the filter's own output.
template <AdaptiveFilter F>
DecisionDirectedTrace run_decision_directed(F& filter, const std::vector<SymbolSample>& samples,
                                            long n_train) {
  if (n_train < 0) throw std::invalid_argument("run_decision_directed: n_train must be >= 0");
  DecisionDirectedTrace trace;
  trace.estimates.reserve(samples.size());
  trace.targets.reserve(samples.size());
  trace.errors.reserve(samples.size());
  long i = 0;
  for (const SymbolSample& s : samples) {
    const cplx x = filter.output(s.r);
    const cplx target = (i < n_train) ? s.d : bpsk_slice(x);
    trace.estimates.push_back(x);
    trace.targets.push_back(target);
    trace.errors.push_back(filter.update(SymbolSample{s.r, target}));
    ++i;
  }
  return trace;
}

}  // namespace jio

#endif  // JIOFILT_ADAPTIVE_HPP
