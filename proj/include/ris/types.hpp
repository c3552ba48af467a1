#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ris {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
inline constexpr Scalar kPi = Scalar(3.14159265358979323846264338327950288L);

template <typename Scalar>
inline constexpr Scalar kTwoPi = Scalar(6.28318530717958647692528676655900577L);

// Error hierarchy. Everything thrown by the library derives from ris::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Effective channel (or a factor of it) is not of full rank.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

// QoS floors cannot be met within the power budget(s).
class Infeasible : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Brute-force grid would exceed its evaluation budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Relay exhaustive search asked for more elements than the cap allows.
class GridCapExceeded : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ris
