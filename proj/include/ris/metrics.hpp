#pragma once

#include <cmath>

#include "ris/linalg.hpp"
#include "ris/model.hpp"
#include "ris/system_config.hpp"

namespace ris {

// H2 * Phi * H1 (K x M).
template <typename Scalar>
CMatrix<Scalar> effective_channel(const ChannelRealization<Scalar>& ch,
                                  const PhaseProfile<Scalar>& phases) {
  return ch.h2 * phases.coefficients().asDiagonal() * ch.h1;
}

// Zero-forcing precoder G = (H2 Phi H1)^+ (M x K). Throws RankDeficient.
template <typename Scalar>
CMatrix<Scalar> zf_precoder(const ChannelRealization<Scalar>& ch,
                            const PhaseProfile<Scalar>& phases) {
  return pseudo_inverse(effective_channel(ch, phases));
}

// Post-ZF SINR: interference is nulled, leaving p_k / sigma^2.
template <typename Scalar>
Scalar sinr_zf(Scalar power, Scalar sigma2) {
  return power / sigma2;
}

// SINR of every user for an arbitrary precoder (interference included).
template <typename Scalar>
Vector<Scalar> sinr(const CMatrix<Scalar>& effective, const CMatrix<Scalar>& precoder,
                    const Vector<Scalar>& powers, Scalar sigma2) {
  const CMatrix<Scalar> gains = effective * precoder;  // (k, i): h_k G_i
  Vector<Scalar> out(gains.rows());
  for (Eigen::Index k = 0; k < gains.rows(); ++k) {
    Scalar interference = sigma2;
    for (Eigen::Index i = 0; i < gains.cols(); ++i)
      if (i != k) interference += powers(i) * std::norm(gains(k, i));
    out(k) = powers(k) * std::norm(gains(k, k)) / interference;
  }
  return out;
}

// Sum rate sum_k log2(1 + p_k / sigma^2).
template <typename Derived>
typename Derived::Scalar spectral_efficiency(const Eigen::MatrixBase<Derived>& powers,
                                             typename Derived::Scalar sigma2) {
  using Scalar = typename Derived::Scalar;
  Scalar rate = 0;
  for (Eigen::Index k = 0; k < powers.size(); ++k)
    rate += std::log1p(powers(k) / sigma2) / std::log(Scalar(2));
  return rate;
}

// Static (power-independent) part of the consumption model:
// K * P_UE + P_BS + N * P_n.
inline double static_power(const SystemConfig& config) {
  return config.users * config.ue_static_power + config.bs_static_power +
         config.ris_elements * config.element_power;
}

// xi * sum(p) + K * P_UE + P_BS + N * P_n.
template <typename Derived>
typename Derived::Scalar total_power(const Eigen::MatrixBase<Derived>& powers,
                                     const SystemConfig& config) {
  using Scalar = typename Derived::Scalar;
  return Scalar(config.amplifier_inefficiency) * powers.sum() + Scalar(static_power(config));
}

// BW * SE / P_total, bits per Joule.
template <typename Derived>
typename Derived::Scalar energy_efficiency(const Eigen::MatrixBase<Derived>& powers,
                                           const SystemConfig& config) {
  using Scalar = typename Derived::Scalar;
  return Scalar(config.bandwidth) * spectral_efficiency(powers, Scalar(config.noise_power)) /
         total_power(powers, config);
}

// tr(G P G^H) for the ZF precoder of the given phases.
template <typename Scalar>
Scalar bs_transmit_power(const PowerAllocation<Scalar>& powers, const ChannelRealization<Scalar>& ch,
                         const PhaseProfile<Scalar>& phases) {
  const CMatrix<Scalar> g = zf_precoder(ch, phases);
  return (g * powers.p.template cast<Complex<Scalar>>().asDiagonal() * g.adjoint()).trace().real();
}

// Per-user BS power cost c_k = ||g_k||^2, so that tr(G P G^H) = sum_k c_k p_k.
template <typename Scalar>
Vector<Scalar> zf_power_costs(const ChannelRealization<Scalar>& ch,
                              const PhaseProfile<Scalar>& phases) {
  return zf_precoder(ch, phases).colwise().squaredNorm().transpose();
}

// Fills the metric fields of an outcome from its own phases and powers.
template <typename Scalar>
void evaluate_outcome(SolveOutcome<Scalar>& out, const ChannelRealization<Scalar>& ch,
                      const SystemConfig& config) {
  const auto& p = out.powers.p;
  out.se = spectral_efficiency(p, Scalar(config.noise_power));
  out.total_power = total_power(p, config);
  out.ee = Scalar(config.bandwidth) * out.se / out.total_power;
  out.bs_tx_power = zf_power_costs(ch, out.phases).dot(p);
}

}  // namespace ris
