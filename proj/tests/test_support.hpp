#ifndef JIOFILT_TEST_SUPPORT_HPP
#define JIOFILT_TEST_SUPPORT_HPP

#include "jiofilt/mmse.hpp"
#include "jiofilt/rng.hpp"
#include "jiofilt/types.hpp"

namespace jio::test {

inline CMatrix random_cmatrix(Rng& rng, Index rows, Index cols) {
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.cgaussian();
  }
  return m;
}

/// Well-conditioned random PSD matrix.
inline HermitianMatrix random_psd(Rng& rng, Index n, double ridge = 0.05) {
  const CMatrix g = random_cmatrix(rng, n, 2 * n);
  CMatrix r = g * g.adjoint() / static_cast<double>(2 * n);
  r += ridge * CMatrix::Identity(n, n);
  return HermitianMatrix::symmetrized(r);
}

/// Random consistent stats with sigma_d^2 = 1 and full-rank MMSE in
/// (1 - c_hi, 1 - c_lo).
inline SecondOrderStats random_stats(Rng& rng, Index m, double c_lo = 0.2,
                                     double c_hi = 0.8) {
  HermitianMatrix r = random_psd(rng, m);
  CVector w0 = rng.cgaussian_vector(m);
  const double raw = (w0.adjoint() * r.mat() * w0)(0).real();
  const double c = c_lo + (c_hi - c_lo) * rng.uniform();
  CVector p = r.mat() * w0 * std::sqrt(c / raw);
  return SecondOrderStats(std::move(r), std::move(p), 1.0);
}

}  // namespace jio::test

#endif  // JIOFILT_TEST_SUPPORT_HPP
