#pragma once

#include <optional>

#include "ris/linalg.hpp"
#include "ris/metrics.hpp"
#include "ris/model.hpp"

namespace ris {

// Nonzero entries of y = vec(Phi^{-1}): x_n = exp(-j theta_n). They sit at
// positions l(n) = n*N + n (0-based) of the N^2-long vector y.
template <typename Scalar>
CVector<Scalar> inverse_phase_vector(const Vector<Scalar>& theta) {
  CVector<Scalar> x(theta.size());
  for (Eigen::Index n = 0; n < theta.size(); ++n) x(n) = std::polar(Scalar(1), -theta(n));
  return x;
}

// Position of the n-th diagonal entry of an N x N matrix inside its
// column-major vectorization (0-based).
inline Eigen::Index diagonal_slot(Eigen::Index n, Eigen::Index size) { return n * size + n; }

// Quadratic form F = y^H A y of the required BS power, restricted to the
// diagonal support of y. With A = (B^T kron H1^+)^H (B^T kron H1^+), where
// B = (Q^{-1} H2)^+ = H2^{-1} sqrt(P), the N x N block on the diagonal slots is
//   reduced(n, m) = A(l(n), l(m)) = C1(n, m) * conj(C2(n, m)),
// C1 = H1^{+H} H1^+ and C2 = B B^H. The N^2 x N^2 matrix is never formed.
// Requires K = N <= M.
template <typename Scalar>
class PhaseQuadraticForm {
 public:
  PhaseQuadraticForm(const ChannelRealization<Scalar>& ch, const Vector<Scalar>& powers) {
    if (ch.users() != ch.elements()) {
      throw InvalidArgument("PhaseQuadraticForm: quadratic form requires K == N");
    }
    if (powers.size() != ch.users()) throw InvalidArgument("PhaseQuadraticForm: K mismatch");
    h1_pinv_ = pseudo_inverse(ch.h1);  // M x N
    const CMatrix<Scalar> h2_inv = pseudo_inverse(ch.h2);
    weighted_h2_pinv_ = h2_inv * powers.cwiseSqrt().template cast<Complex<Scalar>>().asDiagonal();
    const CMatrix<Scalar> c1 = h1_pinv_.adjoint() * h1_pinv_;
    const CMatrix<Scalar> c2 = weighted_h2_pinv_ * weighted_h2_pinv_.adjoint();
    reduced_ = c1.cwiseProduct(c2.conjugate());
    // Hermitian up to rounding; symmetrize so x^H A x is real.
    reduced_ = (reduced_ + reduced_.adjoint()).eval() * Scalar(0.5);
    const Scalar s1 = spectral_norm(h1_pinv_);
    const Scalar s2 = powers.isZero(0) ? Scalar(0) : spectral_norm(weighted_h2_pinv_);
    lambda_max_ = s1 * s1 * s2 * s2;
  }

  const CMatrix<Scalar>& reduced() const { return reduced_; }
  const CMatrix<Scalar>& h1_pinv() const { return h1_pinv_; }
  // (Q^{-1} H2)^+, N x K.
  const CMatrix<Scalar>& weighted_h2_pinv() const { return weighted_h2_pinv_; }

  // Largest eigenvalue of the full Kronecker A: product of the largest
  // eigenvalues of the two Gram factors.
  Scalar lambda_max() const { return lambda_max_; }

  Scalar value(const CVector<Scalar>& x) const { return x.dot(reduced_ * x).real(); }
  Scalar value_at(const Vector<Scalar>& theta) const { return value(inverse_phase_vector(theta)); }

  // dF/dtheta_i = 2 Re( j conj(x_i) (A x)_i ).
  Vector<Scalar> gradient_at(const Vector<Scalar>& theta) const {
    const CVector<Scalar> x = inverse_phase_vector(theta);
    const CVector<Scalar> ax = reduced_ * x;
    Vector<Scalar> q(x.size());
    const Complex<Scalar> j(0, 1);
    for (Eigen::Index i = 0; i < x.size(); ++i) q(i) = Scalar(2) * (j * std::conj(x(i)) * ax(i)).real();
    return q;
  }

 private:
  CMatrix<Scalar> h1_pinv_;
  CMatrix<Scalar> weighted_h2_pinv_;
  CMatrix<Scalar> reduced_;
  Scalar lambda_max_ = 0;
};

// F(Theta) = tr((H2 Phi H1)^+ P (H2 Phi H1)^{+H}) for fixed powers: the BS
// power needed to deliver the powers through the given phases with ZF.
// Uses the reduced quadratic form when K = N, the direct trace otherwise.
template <typename Scalar>
class PhaseObjective {
 public:
  PhaseObjective(const ChannelRealization<Scalar>& ch, const Vector<Scalar>& powers)
      : ch_(&ch), powers_(powers) {
    if (ch.users() == ch.elements()) form_.emplace(ch, powers);
  }

  Scalar value(const Vector<Scalar>& theta) const {
    if (form_) return form_->value_at(theta);
    return direct_value(theta);
  }

  Vector<Scalar> gradient(const Vector<Scalar>& theta) const {
    if (form_) return form_->gradient_at(theta);
    return direct_gradient(theta);
  }

  const std::optional<PhaseQuadraticForm<Scalar>>& quadratic_form() const { return form_; }

  // Trace form, valid for any K <= N.
  Scalar direct_value(const Vector<Scalar>& theta) const {
    const auto costs = zf_power_costs(*ch_, PhaseProfile<Scalar>(theta));
    return costs.dot(powers_);
  }

  // With E = H2 Phi H1, W = (E E^H)^{-1} and Z = E^H W P W:
  // dF/dtheta_n = -2 Re( j phi_n * H1(n,:) Z H2(:,n) ).
  Vector<Scalar> direct_gradient(const Vector<Scalar>& theta) const {
    const PhaseProfile<Scalar> phases(theta);
    const CVector<Scalar> phi = phases.coefficients();
    const CMatrix<Scalar> e = ch_->h2 * phi.asDiagonal() * ch_->h1;
    const CMatrix<Scalar> gram = e * e.adjoint();
    Eigen::FullPivLU<CMatrix<Scalar>> lu(gram);
    if (!lu.isInvertible()) throw RankDeficient("phase gradient: effective channel rank deficient");
    const CMatrix<Scalar> w = lu.inverse();
    const CMatrix<Scalar> z =
        e.adjoint() * w * powers_.template cast<Complex<Scalar>>().asDiagonal() * w;
    Vector<Scalar> q(theta.size());
    const Complex<Scalar> j(0, 1);
    for (Eigen::Index n = 0; n < theta.size(); ++n) {
      const Complex<Scalar> t = (ch_->h1.row(n) * z * ch_->h2.col(n))(0, 0);
      q(n) = -Scalar(2) * (j * phi(n) * t).real();
    }
    return q;
  }

 private:
  const ChannelRealization<Scalar>* ch_;
  Vector<Scalar> powers_;
  std::optional<PhaseQuadraticForm<Scalar>> form_;
};

template <typename Scalar>
Scalar phase_objective(const PhaseProfile<Scalar>& phases, const PowerAllocation<Scalar>& powers,
                       const ChannelRealization<Scalar>& ch) {
  return PhaseObjective<Scalar>(ch, powers.p).value(phases.theta());
}

template <typename Scalar>
Vector<Scalar> phase_gradient(const PhaseProfile<Scalar>& phases,
                              const PowerAllocation<Scalar>& powers,
                              const ChannelRealization<Scalar>& ch) {
  return PhaseObjective<Scalar>(ch, powers.p).gradient(phases.theta());
}

// Squared distance between two reflection-coefficient vectors,
// ||Phi(a) - Phi(b)||_F^2.
template <typename Scalar>
Scalar phase_change(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  Scalar s = 0;
  for (Eigen::Index n = 0; n < a.size(); ++n) {
    const Scalar half = Scalar(0.5) * (a(n) - b(n));
    s += Scalar(4) * std::sin(half) * std::sin(half);
  }
  return s;
}

}  // namespace ris
