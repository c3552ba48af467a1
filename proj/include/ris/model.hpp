#pragma once

#include <cmath>
#include <vector>

#include "ris/system_config.hpp"
#include "ris/types.hpp"

namespace ris {

// One Monte-Carlo draw: BS->RIS channel h1 (N x M), RIS->users channel h2
// (K x N, row k is user k) and the user positions that produced it.
template <typename Scalar>
struct ChannelRealization {
  CMatrix<Scalar> h1;
  CMatrix<Scalar> h2;
  std::vector<Point2> user_positions;

  Eigen::Index elements() const { return h1.rows(); }
  Eigen::Index antennas() const { return h1.cols(); }
  Eigen::Index users() const { return h2.rows(); }
};

// RIS phase vector. Angles are kept in [0, 2pi); reflection coefficients
// exp(j*theta) are derived on demand so they are unit-modulus by construction.
template <typename Scalar>
class PhaseProfile {
 public:
  PhaseProfile() = default;
  explicit PhaseProfile(Vector<Scalar> theta) : theta_(std::move(theta)) {
    for (Eigen::Index n = 0; n < theta_.size(); ++n) theta_(n) = wrap(theta_(n));
  }

  static PhaseProfile constant(Eigen::Index n, Scalar angle) {
    return PhaseProfile(Vector<Scalar>::Constant(n, angle));
  }

  const Vector<Scalar>& theta() const { return theta_; }
  Eigen::Index size() const { return theta_.size(); }

  // phi_n = exp(j theta_n), the diagonal of Phi.
  CVector<Scalar> coefficients() const {
    CVector<Scalar> phi(theta_.size());
    for (Eigen::Index n = 0; n < theta_.size(); ++n) phi(n) = std::polar(Scalar(1), theta_(n));
    return phi;
  }

  static Scalar wrap(Scalar angle) {
    Scalar w = std::fmod(angle, kTwoPi<Scalar>);
    if (w < Scalar(0)) w += kTwoPi<Scalar>;
    if (w >= kTwoPi<Scalar>) w -= kTwoPi<Scalar>;
    return w;
  }

 private:
  Vector<Scalar> theta_;
};

// Per-user transmit powers in watts.
template <typename Scalar>
struct PowerAllocation {
  Vector<Scalar> p;

  static PowerAllocation uniform(Eigen::Index users, Scalar each) {
    return {Vector<Scalar>::Constant(users, each)};
  }
  Eigen::Index size() const { return p.size(); }
};

// Result of one joint optimization (or of a baseline / oracle evaluation).
template <typename Scalar>
struct SolveOutcome {
  PhaseProfile<Scalar> phases;
  PowerAllocation<Scalar> powers;
  Scalar se = 0;           // bits/s/Hz
  Scalar ee = 0;           // bits/Joule
  Scalar total_power = 0;  // watts
  Scalar bs_tx_power = 0;  // watts
  int outer_iterations = 0;
  bool feasible = false;
  bool qos_relaxed = false;
  bool converged = false;
  // Objective (EE or SE) after each accepted outer iteration.
  std::vector<Scalar> history;
};

}  // namespace ris
