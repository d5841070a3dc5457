#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "jiofilt/linalg.hpp"
#include "test_support.hpp"

using namespace jio;
using jio::test::random_cmatrix;
using jio::test::random_psd;

namespace {

// Independent solve oracle: Gaussian elimination with partial pivoting,
// written against plain loops so it shares nothing with the library path.
CVector gaussian_elimination_solve(CMatrix a, CVector b) {
  const Index n = a.rows();
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    for (Index row = col + 1; row < n; ++row) {
      if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
    }
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      std::swap(b[pivot], b[col]);
    }
    for (Index row = col + 1; row < n; ++row) {
      const cplx factor = a(row, col) / a(col, col);
      a.row(row) -= factor * a.row(col);
      b[row] -= factor * b[col];
    }
  }
  CVector x = CVector::Zero(n);
  for (Index row = n - 1; row >= 0; --row) {
    cplx acc = b[row];
    for (Index col = row + 1; col < n; ++col) acc -= a(row, col) * x[col];
    x[row] = acc / a(row, row);
  }
  return x;
}

// Characteristic polynomial coefficients via the Faddeev-LeVerrier
// recursion: p(z) = z^n + c[1] z^{n-1} + ... + c[n].
std::vector<cplx> char_poly(const CMatrix& a) {
  const Index n = a.rows();
  std::vector<cplx> c(n + 1);
  c[0] = 1.0;
  CMatrix m = CMatrix::Zero(n, n);
  for (Index k = 1; k <= n; ++k) {
    m = a * m + c[k - 1] * CMatrix::Identity(n, n);
    c[k] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

// Durand-Kerner simultaneous root iteration on a monic polynomial.
std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs) {
  const std::size_t degree = coeffs.size() - 1;
  auto eval = [&](cplx z) {
    cplx acc = coeffs[0];
    for (std::size_t i = 1; i < coeffs.size(); ++i) acc = acc * z + coeffs[i];
    return acc;
  };
  std::vector<cplx> roots(degree);
  for (std::size_t i = 0; i < degree; ++i) {
    roots[i] = std::pow(cplx(0.4, 0.9), static_cast<double>(i + 1));
  }
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (std::size_t i = 0; i < degree; ++i) {
      cplx denom = 1.0;
      for (std::size_t j = 0; j < degree; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      const cplx delta = eval(roots[i]) / denom;
      roots[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-13) break;
  }
  return roots;
}

}  // namespace

TEST_CASE("hermitian matrix validation") {
  const CMatrix rect = CMatrix::Zero(2, 3);
  CHECK_THROWS_AS(HermitianMatrix{rect}, std::invalid_argument);
  CMatrix skew(2, 2);
  skew << cplx(1, 0), cplx(0, 1), cplx(0, 1), cplx(2, 0);  // not Hermitian
  CHECK_THROWS_AS(HermitianMatrix{skew}, std::invalid_argument);
  const CMatrix eye = CMatrix::Identity(3, 3);
  CHECK_NOTHROW(HermitianMatrix{eye});
}

TEST_CASE("hermitian_solve identity and diagonal cases") {
  {
    CVector b(2);
    b << cplx(1, 0), cplx(0, 1);
    const CVector x = hermitian_solve(HermitianMatrix(CMatrix::Identity(2, 2)), b);
    CHECK((x - b).norm() == doctest::Approx(0.0).epsilon(1e-12));
  }
  {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 4.0;
    CVector b(2);
    b << 2.0, 4.0;
    const CVector x = hermitian_solve(HermitianMatrix(a), b);
    CHECK(std::abs(x[0] - cplx(1.0)) < 1e-12);
    CHECK(std::abs(x[1] - cplx(1.0)) < 1e-12);
  }
}

TEST_CASE("hermitian_solve matches the elimination oracle on a random PSD system") {
  Rng rng(11);
  const HermitianMatrix a = random_psd(rng, 6);
  const CVector b = rng.cgaussian_vector(6);
  const CVector x = hermitian_solve(a, b);
  const CVector x_oracle = gaussian_elimination_solve(a.mat(), b);
  CHECK((x - x_oracle).norm() < 1e-8 * x_oracle.norm());
  CHECK((a.mat() * x - b).norm() < 1e-8 * b.norm());
}

TEST_CASE("hermitian_solve dimension mismatch") {
  const HermitianMatrix a{CMatrix::Identity(3, 3)};
  const CVector b = CVector::Ones(2);
  CHECK_THROWS_AS(hermitian_solve(a, b), std::invalid_argument);
}

TEST_CASE("hermitian_solve residual property over random PSD sizes") {
  Rng rng(12);
  for (Index n : {2, 5, 13, 32}) {
    for (int rep = 0; rep < 3; ++rep) {
      const HermitianMatrix a = random_psd(rng, n);
      const CVector b = rng.cgaussian_vector(n);
      const CVector x = hermitian_solve(a, b);
      CHECK((a.mat() * x - b).norm() <= 1e-8 * b.norm());
    }
  }
}

TEST_CASE("hermitian_solve recovers a rank-deficient system through the ridge") {
  // Rank-1 PSD with b in its range; the ridge keeps the solve usable.
  CVector u(3);
  u << 1.0, cplx(0, 1), 0.5;
  const CMatrix a = u * u.adjoint();
  const CVector b = a * CVector::Ones(3);
  const CVector x = hermitian_solve(HermitianMatrix::symmetrized(a), b);
  CHECK((a * x - b).norm() < 1e-6 * b.norm());
}

TEST_CASE("spectral_radius on diagonal and rotation matrices") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = 0.2;
  CHECK(spectral_radius(d) == doctest::Approx(0.5).epsilon(1e-10));

  CMatrix rot(2, 2);
  rot << 0.0, -1.0, 1.0, 0.0;
  CHECK(spectral_radius(rot) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(spectral_radius(CMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("spectral_radius matches the characteristic-polynomial root oracle") {
  Rng rng(21);
  const CMatrix a = random_cmatrix(rng, 5, 5);
  const std::vector<cplx> roots = poly_roots(char_poly(a));
  double oracle = 0.0;
  for (const cplx& root : roots) oracle = std::max(oracle, std::abs(root));
  CHECK(spectral_radius(a) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("spectral_radius scales homogeneously") {
  Rng rng(22);
  for (int rep = 0; rep < 5; ++rep) {
    const CMatrix a = random_cmatrix(rng, 6, 6);
    const cplx alpha(rng.gaussian(), rng.gaussian());
    const double lhs = spectral_radius(alpha * a);
    const double rhs = std::abs(alpha) * spectral_radius(a);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("pinv_rank_limited identity and projector cases") {
  const CMatrix i3 = CMatrix::Identity(3, 3);
  CHECK((pinv_rank_limited(i3, 1e-12) - i3).norm() < 1e-12);

  CVector w(2);
  w << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const CMatrix proj = w * w.adjoint();  // rank-1 projector is its own pinv
  CHECK((pinv_rank_limited(proj, 1e-12) - proj).norm() < 1e-10);
}

TEST_CASE("pinv_rank_limited satisfies the Penrose identities on a rank-2 matrix") {
  Rng rng(31);
  const CMatrix a = random_cmatrix(rng, 4, 2) * random_cmatrix(rng, 2, 4);  // rank 2
  const CMatrix ap = pinv_rank_limited(a, 1e-10);
  const double scale = a.norm();
  CHECK((a * ap * a - a).norm() < 1e-8 * scale);
  CHECK((ap * a * ap - ap).norm() < 1e-8 * ap.norm());
  CHECK(((a * ap).adjoint() - a * ap).norm() < 1e-8);
  CHECK(((ap * a).adjoint() - ap * a).norm() < 1e-8);
}

TEST_CASE("pinv_rank_limited rejects nonpositive tolerance") {
  CHECK_THROWS_AS(pinv_rank_limited(CMatrix::Identity(2, 2), 0.0), std::invalid_argument);
}

TEST_CASE("orthonormalize_columns drops duplicate directions") {
  CMatrix a = CMatrix::Zero(3, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;  // parallel to the first column
  const Orthonormalized ortho = orthonormalize_columns(a, 1e-8);
  CHECK(ortho.q.cols() == 1);
  REQUIRE(ortho.dropped.size() == 1);
  CHECK(ortho.dropped[0] == 1);
  CHECK(std::abs(ortho.q.col(0).norm() - 1.0) < 1e-12);
}

TEST_CASE("orthonormalize_columns keeps an identity basis") {
  const Orthonormalized ortho = orthonormalize_columns(CMatrix::Identity(2, 2), 1e-8);
  CHECK(ortho.dropped.empty());
  CHECK((ortho.q - CMatrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("orthonormalize_columns produces orthonormal columns and preserves span") {
  Rng rng(41);
  const CMatrix a = random_cmatrix(rng, 8, 4);
  const Orthonormalized ortho = orthonormalize_columns(a, 1e-8);
  CHECK(ortho.dropped.empty());
  const CMatrix gram = ortho.q.adjoint() * ortho.q;
  CHECK((gram - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  for (Index j = 0; j < a.cols(); ++j) {
    const CVector col = a.col(j);
    const CVector proj = ortho.q * (ortho.q.adjoint() * col);
    CHECK((col - proj).norm() <= 1e-8 * col.norm());
  }
}

TEST_CASE("orthonormalize_columns rejects fully degenerate input") {
  CHECK_THROWS_AS(orthonormalize_columns(CMatrix::Zero(3, 2), 1e-8), std::invalid_argument);
}

TEST_CASE("hermitian_sqrt squares back to the input") {
  Rng rng(51);
  const HermitianMatrix a = random_psd(rng, 6);
  const CMatrix root = hermitian_sqrt(a);
  CHECK((root * root - a.mat()).norm() < 1e-10 * a.mat().norm());
}
