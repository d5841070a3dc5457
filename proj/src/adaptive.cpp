#include "jiofilt/adaptive.hpp"

#include <cmath>

#include "jiofilt/mmse.hpp"

namespace jio {

namespace {

constexpr double kStateBound = 1e6;

void check_dim(const CVector& r, Index m, const char* who) {
  if (r.size() != m) {
    throw std::invalid_argument(std::string(who) + ": received vector has length " +
                                std::to_string(r.size()) + ", expected " + std::to_string(m));
  }
}

bool bounded(const CMatrix& m) {
  return m.allFinite() && m.cwiseAbs().maxCoeff() <= kStateBound;
}

bool bounded(const CVector& v) {
  return v.allFinite() && (v.size() == 0 || v.cwiseAbs().maxCoeff() <= kStateBound);
}

template <typename Counter>
cplx jio_update_impl(JioState& st, const SymbolSample& sample, Counter& c) {
  check_dim(sample.r, st.input_dim(), "jio_update");
  cplx e{};
  for (int pass = 0; pass < std::max(st.inner_iterations, 1); ++pass) {
    const CVector r_bar = counted::adjoint_matvec(st.S, sample.r, c);
    const cplx x = counted::dot(st.w_bar, r_bar, c);
    c.add(1);
    e = sample.d - x;
    const double r_energy = counted::energy(sample.r, c);
    const double w_energy = counted::energy(st.w_bar, c);

    double mu_denominator = r_energy;
    if (st.step_mode == StepMode::projected_energy) {
      mu_denominator = counted::energy(r_bar, c);
    }
    c.mul(1);
    const double mu = st.mu0 / (mu_denominator + st.eps);
    c.mul(1);
    const cplx w_gain = mu * std::conj(e);

    const bool update_projection = std::sqrt(w_energy) >= st.eps;
    cplx s_gain{};
    if (update_projection) {
      c.mul(1);
      const double denom = w_energy * r_energy;
      c.mul(1);
      const double eta = st.eta0 / (denom + st.eps);
      c.mul(1);
      s_gain = eta * std::conj(e);
    }

    // Both updates consume the same pre-update e and w_bar.
    const CVector w_old = st.w_bar;
    counted::axpy(w_gain, r_bar, st.w_bar, c);
    if (update_projection) {
      const CMatrix direction = counted::outer(sample.r, w_old, c);
      counted::matrix_axpy(s_gain, direction, st.S, c);
    }
  }
  ++st.iteration;
  if (!bounded(st.S) || !bounded(st.w_bar)) {
    throw DivergenceError("jio_update: state diverged", st.iteration);
  }
  return e;
}

template <typename Counter>
cplx nlms_update_impl(FullRankNlmsState& st, const SymbolSample& sample, Counter& c) {
  check_dim(sample.r, st.w.size(), "fullrank_nlms_update");
  const cplx y = counted::dot(st.w, sample.r, c);
  c.add(1);
  const cplx e = sample.d - y;
  const double energy = counted::energy(sample.r, c);
  c.mul(1);
  const double mu = st.mu0 / (energy + st.eps);
  c.mul(1);
  const cplx gain = mu * std::conj(e);
  counted::axpy(gain, sample.r, st.w, c);
  ++st.iteration;
  if (!bounded(st.w)) {
    throw DivergenceError("fullrank_nlms_update: state diverged", st.iteration);
  }
  return e;
}

template <typename Counter>
cplx rls_update_impl(FullRankRlsState& st, const SymbolSample& sample, Counter& c) {
  check_dim(sample.r, st.w.size(), "fullrank_rls_update");
  const Index m = st.w.size();
  const cplx y = counted::dot(st.w, sample.r, c);
  c.add(1);
  const cplx e = sample.d - y;
  const CVector pi = counted::matvec(st.P, sample.r, c);
  const cplx sigma = counted::dot(sample.r, pi, c);
  c.add(1);
  const cplx denom = st.lambda + sigma;
  c.mul(static_cast<unsigned long long>(m));
  const CVector k = pi / denom;
  counted::axpy(std::conj(e), k, st.w, c);
  CMatrix update = counted::outer(k, pi, c);
  c.add(static_cast<unsigned long long>(m * m));
  CMatrix p_new = st.P - update;
  c.mul(static_cast<unsigned long long>(m * m));
  p_new /= st.lambda;
  // Re-symmetrize so P stays Hermitian through roundoff.
  c.add(static_cast<unsigned long long>(m * m));
  c.mul(static_cast<unsigned long long>(m * m));
  st.P = 0.5 * (p_new + p_new.adjoint().eval());
  ++st.iteration;
  // P legitimately starts at 1/delta, so only its finiteness is policed.
  if (!bounded(st.w) || !st.P.allFinite()) {
    throw DivergenceError("fullrank_rls_update: state diverged", st.iteration);
  }
  return e;
}

template <typename Counter>
cplx mwf_update_impl(MwfNlmsState& st, const SymbolSample& sample, Counter& c) {
  check_dim(sample.r, st.R_hat.rows(), "mwf_update");
  c.mul(static_cast<unsigned long long>(st.R_hat.size()));
  st.R_hat *= st.forget;
  CMatrix rr = counted::outer(sample.r, sample.r, c);
  c.add(static_cast<unsigned long long>(st.R_hat.size()));
  st.R_hat += rr;
  c.mul(static_cast<unsigned long long>(st.p_hat.size()));
  st.p_hat *= st.forget;
  c.mul(1);
  counted::axpy(std::conj(sample.d), sample.r, st.p_hat, c);

  if (st.iteration % std::max(st.rebuild_every, 1) == 0 && st.p_hat.norm() > 0.0) {
    // Krylov basis from the running estimates; counted as its matvecs and
    // Gram-Schmidt passes.
    const Index d = st.target_rank;
    CMatrix cols(st.R_hat.rows(), d);
    CVector v = st.p_hat;
    for (Index j = 0; j < d; ++j) {
      cols.col(j) = v;
      if (j + 1 < d) v = counted::matvec(st.R_hat, v, c);
    }
    CMatrix q(cols.rows(), d);
    Index kept = 0;
    for (Index j = 0; j < d; ++j) {
      CVector u = cols.col(j);
      const double original = u.norm();
      for (int pass = 0; pass < 2; ++pass) {
        for (Index k = 0; k < kept; ++k) {
          const CVector qk = q.col(k);
          const cplx proj = counted::dot(qk, u, c);
          counted::axpy(-proj, qk, u, c);
        }
      }
      c.mul(static_cast<unsigned long long>(u.size()));
      c.add(static_cast<unsigned long long>(u.size() - 1));
      const double resid = u.norm();
      if (original <= 0.0 || resid < 1e-8 * original) continue;
      c.mul(static_cast<unsigned long long>(u.size()));
      q.col(kept++) = u / resid;
    }
    if (kept > 0) {
      CMatrix s_new = q.leftCols(kept);
      CVector w_new = CVector::Zero(kept);
      // Carry the effective filter across the basis change.
      if (st.w_bar.size() > 0 && st.S.size() > 0) {
        w_new = s_new.adjoint() * (st.S * st.w_bar);
      }
      st.S = std::move(s_new);
      st.w_bar = std::move(w_new);
    }
  }

  const CVector r_bar = counted::adjoint_matvec(st.S, sample.r, c);
  const cplx x = counted::dot(st.w_bar, r_bar, c);
  c.add(1);
  const cplx e = sample.d - x;
  const double energy = counted::energy(r_bar, c);
  c.mul(1);
  const double mu = st.mu0 / (energy + st.eps);
  c.mul(1);
  const cplx gain = mu * std::conj(e);
  counted::axpy(gain, r_bar, st.w_bar, c);
  ++st.iteration;
  if (!bounded(st.w_bar) || !bounded(st.S)) {
    throw DivergenceError("mwf_update: state diverged", st.iteration);
  }
  return e;
}

}  // namespace

JioState JioState::initial(Index m, Index d, double mu0, double eta0, StepMode mode,
                           double eps) {
  if (d < 1 || d > m) throw std::invalid_argument("JioState::initial: need 1 <= D <= M");
  JioState st;
  st.S = identity_projection(m, d).S;
  st.w_bar = CVector::Zero(d);
  st.mu0 = mu0;
  st.eta0 = eta0;
  st.step_mode = mode;
  st.eps = eps;
  return st;
}

cplx JioState::output(const CVector& r) const {
  check_dim(r, input_dim(), "jio_output");
  return w_bar.dot(S.adjoint() * r);
}

cplx JioState::update(const SymbolSample& sample) {
  NullCounter c;
  return jio_update_impl(*this, sample, c);
}

OpCount jio_update_counted(JioState& state, const SymbolSample& sample) {
  OpCounter c;
  jio_update_impl(state, sample, c);
  return c.count;
}

FullRankNlmsState FullRankNlmsState::initial(Index m, double mu0, double eps) {
  FullRankNlmsState st;
  st.w = CVector::Zero(m);
  st.mu0 = mu0;
  st.eps = eps;
  return st;
}

cplx FullRankNlmsState::update(const SymbolSample& sample) {
  NullCounter c;
  return nlms_update_impl(*this, sample, c);
}

OpCount fullrank_nlms_update_counted(FullRankNlmsState& state, const SymbolSample& sample) {
  OpCounter c;
  nlms_update_impl(state, sample, c);
  return c.count;
}

FullRankRlsState FullRankRlsState::initial(Index m, double lambda, double delta) {
  if (!(lambda > 0.9 && lambda <= 1.0)) {
    throw std::invalid_argument("FullRankRlsState::initial: lambda must lie in (0.9, 1]");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("FullRankRlsState::initial: delta must be positive");
  }
  FullRankRlsState st;
  st.w = CVector::Zero(m);
  st.P = CMatrix::Identity(m, m) / delta;
  st.lambda = lambda;
  return st;
}

cplx FullRankRlsState::update(const SymbolSample& sample) {
  NullCounter c;
  return rls_update_impl(*this, sample, c);
}

OpCount fullrank_rls_update_counted(FullRankRlsState& state, const SymbolSample& sample) {
  OpCounter c;
  rls_update_impl(state, sample, c);
  return c.count;
}

MwfNlmsState MwfNlmsState::initial(Index m, Index d, double mu0, double forget,
                                   int rebuild_every) {
  if (d < 1 || d > m) throw std::invalid_argument("MwfNlmsState::initial: need 1 <= D <= M");
  MwfNlmsState st;
  st.R_hat = CMatrix::Zero(m, m);
  st.p_hat = CVector::Zero(m);
  st.S = identity_projection(m, d).S;
  st.w_bar = CVector::Zero(d);
  st.mu0 = mu0;
  st.forget = forget;
  st.rebuild_every = rebuild_every;
  st.target_rank = d;
  return st;
}

cplx MwfNlmsState::update(const SymbolSample& sample) {
  NullCounter c;
  return mwf_update_impl(*this, sample, c);
}

OpCount mwf_update_counted(MwfNlmsState& state, const SymbolSample& sample) {
  OpCounter c;
  mwf_update_impl(state, sample, c);
  return c.count;
}

}  // namespace jio
