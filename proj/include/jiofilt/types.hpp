#ifndef JIOFILT_TYPES_HPP
#define JIOFILT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace jio {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr const char* kVersion = "0.1.0";

/// Invalid configuration input (files, CLI values). CLI exit category 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem/output failure carrying path context. CLI exit category 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an adaptive recursion produces non-finite or runaway state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

inline bool all_finite(const CMatrix& a) { return a.allFinite(); }
inline bool all_finite(const CVector& a) { return a.allFinite(); }

}  // namespace jio

#endif  // JIOFILT_TYPES_HPP
