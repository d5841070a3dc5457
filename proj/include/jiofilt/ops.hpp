#ifndef JIOFILT_OPS_HPP
#define JIOFILT_OPS_HPP

#include "jiofilt/types.hpp"

namespace jio {

/// Arithmetic tally for one update call.
///
/// Counting convention (used everywhere counts are reported):
///   - one complex addition or subtraction          -> 1 addition
///   - one complex multiplication or division       -> 1 multiplication
///   - real-by-complex or real-by-real scalar ops   -> same as above
///   - conjugation, negation, assignment            -> free
///   - denominator guard epsilons                   -> folded into the division
/// A length-n inner product therefore costs n multiplications and n-1
/// additions.
struct OpCount {
  unsigned long long adds = 0;
  unsigned long long mults = 0;

  OpCount& operator+=(const OpCount& o) {
    adds += o.adds;
    mults += o.mults;
    return *this;
  }
};

/// Counter policy that compiles to nothing; the production update paths run
/// through it so counted and uncounted code are the same template.
struct NullCounter {
  void add(unsigned long long) {}
  void mul(unsigned long long) {}
};

struct OpCounter {
  void add(unsigned long long n) { count.adds += n; }
  void mul(unsigned long long n) { count.mults += n; }
  OpCount count;
};

namespace counted {

// a^H b
template <typename Counter>
cplx dot(const CVector& a, const CVector& b, Counter& c) {
  c.mul(static_cast<unsigned long long>(a.size()));
  c.add(static_cast<unsigned long long>(a.size() - 1));
  return a.dot(b);
}

// ||a||^2
template <typename Counter>
double energy(const CVector& a, Counter& c) {
  c.mul(static_cast<unsigned long long>(a.size()));
  c.add(static_cast<unsigned long long>(a.size() - 1));
  return a.squaredNorm();
}

// y += alpha * x
template <typename Counter>
void axpy(cplx alpha, const CVector& x, CVector& y, Counter& c) {
  c.mul(static_cast<unsigned long long>(x.size()));
  c.add(static_cast<unsigned long long>(x.size()));
  y += alpha * x;
}

// A^H x, counted as cols(A) inner products of length rows(A)
template <typename Counter>
CVector adjoint_matvec(const CMatrix& a, const CVector& x, Counter& c) {
  c.mul(static_cast<unsigned long long>(a.rows() * a.cols()));
  c.add(static_cast<unsigned long long>((a.rows() - 1) * a.cols()));
  return a.adjoint() * x;
}

// A x
template <typename Counter>
CVector matvec(const CMatrix& a, const CVector& x, Counter& c) {
  c.mul(static_cast<unsigned long long>(a.rows() * a.cols()));
  c.add(static_cast<unsigned long long>(a.rows() * (a.cols() - 1)));
  return a * x;
}

// x y^H
template <typename Counter>
CMatrix outer(const CVector& x, const CVector& y, Counter& c) {
  c.mul(static_cast<unsigned long long>(x.size() * y.size()));
  return x * y.adjoint();
}

// A += alpha * B
template <typename Counter>
void matrix_axpy(cplx alpha, const CMatrix& b, CMatrix& a, Counter& c) {
  c.mul(static_cast<unsigned long long>(b.size()));
  c.add(static_cast<unsigned long long>(b.size()));
  a += alpha * b;
}

}  // namespace counted

}  // namespace jio

#endif  // JIOFILT_OPS_HPP
