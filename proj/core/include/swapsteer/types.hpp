#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace swapsteer {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

// Structural invariants (Hermiticity, normalization, positivity) are enforced
// at 1e-12; quantities that pass through an eigen/SVD solve get 1e-10.  All
// operators in this library live in dimension <= 64, so conditioning is benign.
inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kSpectralTol = 1e-10;

// Malformed arguments: bad dimensions, broken invariants, out-of-range values.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Two computations that must agree (e.g. a direct evaluation and its Fourier
// form) disagreed beyond tolerance.
class InconsistencyError : public std::runtime_error {
 public:
  explicit InconsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace swapsteer
