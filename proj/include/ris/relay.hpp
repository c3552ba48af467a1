#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "ris/linalg.hpp"
#include "ris/metrics.hpp"
#include "ris/power_dinkelbach.hpp"

namespace ris {

// Diagonal of the N x N amplify-and-forward matrix V.
template <typename Scalar>
struct RelayGains {
  CVector<Scalar> v;
};

enum class NoiseAmplification {
  squared,  // |h_k V V^H h_k^H|^2 + sigma^2
  linear,   // relay_noise * h_k V V^H h_k^H + sigma^2
};

struct RelayNoiseModel {
  NoiseAmplification form = NoiseAmplification::squared;
  double relay_noise_power = 0.0;  // used by the linear form and by the relay power
};

inline RelayNoiseModel relay_noise_model(const SystemConfig& config,
                                         NoiseAmplification form = NoiseAmplification::squared) {
  return {form, config.relay_noise()};
}

// h_{2,k} V V^H h_{2,k}^H = sum_n |h2(k, n)|^2 |v_n|^2.
template <typename Scalar>
Vector<Scalar> amplified_noise_gain(const RelayGains<Scalar>& gains,
                                    const ChannelRealization<Scalar>& ch) {
  return ch.h2.cwiseAbs2() * gains.v.cwiseAbs2();
}

template <typename Scalar>
Vector<Scalar> relay_noise_levels(const RelayGains<Scalar>& gains,
                                  const ChannelRealization<Scalar>& ch, Scalar sigma2,
                                  const RelayNoiseModel& model) {
  const Vector<Scalar> a = amplified_noise_gain(gains, ch);
  if (model.form == NoiseAmplification::linear)
    return (Scalar(model.relay_noise_power) * a).array() + sigma2;
  return a.array().square() + sigma2;
}

// sum_k log2(1 + p_k / (|h_k V V^H h_k^H|^2 + sigma^2)), no pre-log factor.
template <typename Scalar>
Scalar relay_rate(const PowerAllocation<Scalar>& powers, const RelayGains<Scalar>& gains,
                  const ChannelRealization<Scalar>& ch, Scalar sigma2,
                  const RelayNoiseModel& model = {}) {
  const Vector<Scalar> noise = relay_noise_levels(gains, ch, sigma2, model);
  Scalar r = 0;
  for (Eigen::Index k = 0; k < noise.size(); ++k) r += std::log1p(powers.p(k) / noise(k));
  return r / std::log(Scalar(2));
}

// Squared column norms of H2^+, the relay output cost of each user's power.
template <typename Scalar>
Vector<Scalar> relay_signal_costs(const ChannelRealization<Scalar>& ch) {
  return pseudo_inverse(ch.h2).colwise().squaredNorm().transpose();
}

// tr(H2^+ P H2^{+H} + V V^H sigma_R^2).
template <typename Scalar>
Scalar relay_power(const PowerAllocation<Scalar>& powers, const RelayGains<Scalar>& gains,
                   const ChannelRealization<Scalar>& ch, Scalar relay_noise) {
  const CMatrix<Scalar> h2_pinv = pseudo_inverse(ch.h2);
  const CMatrix<Scalar> signal =
      h2_pinv * powers.p.template cast<Complex<Scalar>>().asDiagonal() * h2_pinv.adjoint();
  return signal.trace().real() + relay_noise * gains.v.squaredNorm();
}

// Static part of the relay-system consumption: P_BS + K P_UE + N P_R.
inline double relay_static_power(const SystemConfig& config) {
  return config.bs_static_power + config.users * config.ue_static_power +
         config.ris_elements * config.relay_antenna_power;
}

struct RelayGridSpec {
  int magnitude_levels = 8;  // uniform on [0, v_max], both ends included
  int phase_levels = 16;     // uniform on [0, 2pi)
  int max_elements = 4;

  // Doubling resolution keeps every point of the coarser grid.
  RelayGridSpec refined() const { return {2 * magnitude_levels - 1, 2 * phase_levels, max_elements}; }
};

template <typename Scalar>
struct RelayOutcome {
  RelayGains<Scalar> gains;
  PowerAllocation<Scalar> powers;
  Scalar se = 0;
  Scalar ee = 0;
  Scalar total_power = 0;
  Scalar bs_tx_power = 0;
  Scalar relay_tx_power = 0;
  int outer_iterations = 0;
  bool feasible = false;
  bool converged = false;
  std::uint64_t grid_points = 0;  // per V search
  std::vector<Scalar> history;
};

// Everything the relay EE needs at one (V, P) pair.
template <typename Scalar>
struct RelayEvaluation {
  bool feasible = false;
  Scalar rate = 0;
  Scalar ee = 0;
  Scalar bs_power = 0;
  Scalar relay_power = 0;
  Scalar total_power = 0;
};

namespace detail {

template <typename Scalar>
struct RelayContext {
  const ChannelRealization<Scalar>& ch;
  const SystemConfig& config;
  RelayNoiseModel noise;
  Vector<Scalar> signal_costs;  // ||col_k(H2^+)||^2
  Vector<Scalar> min_rates;
};

template <typename Scalar>
RelayEvaluation<Scalar> evaluate_relay(const RelayContext<Scalar>& ctx, const CVector<Scalar>& v,
                                       const Vector<Scalar>& p, const Vector<Scalar>* bs_costs) {
  RelayEvaluation<Scalar> ev;
  const auto& cfg = ctx.config;
  std::optional<Vector<Scalar>> costs;
  if (bs_costs) {
    costs = *bs_costs;
  } else {
    const CMatrix<Scalar> e = ctx.ch.h2 * v.asDiagonal() * ctx.ch.h1;
    costs = right_inverse_column_costs(e);
    if (!costs) return ev;
  }
  const Scalar tol = Scalar(1) + Scalar(1e-9);
  ev.bs_power = costs->dot(p);
  ev.relay_power = ctx.signal_costs.dot(p) + Scalar(ctx.noise.relay_noise_power) * v.squaredNorm();
  if (ev.bs_power > Scalar(cfg.max_tx_power) * tol) return ev;
  if (ev.relay_power > Scalar(cfg.relay_max()) * tol) return ev;
  const Vector<Scalar> noise =
      relay_noise_levels(RelayGains<Scalar>{v}, ctx.ch, Scalar(cfg.noise_power), ctx.noise);
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const Scalar r = std::log1p(p(k) / noise(k)) / std::log(Scalar(2));
    if (r < ctx.min_rates(k) * (Scalar(1) - Scalar(1e-9))) return ev;
    ev.rate += r;
  }
  ev.total_power = Scalar(cfg.amplifier_inefficiency) * p.sum() +
                   Scalar(cfg.relay_amplifier_inefficiency) * ev.relay_power +
                   Scalar(relay_static_power(cfg));
  ev.ee = Scalar(cfg.bandwidth) * ev.rate / ev.total_power;
  ev.feasible = true;
  return ev;
}

}  // namespace detail

template <typename Scalar>
struct RelayGridResult {
  std::optional<RelayGains<Scalar>> best;
  RelayEvaluation<Scalar> evaluation;
  std::uint64_t points = 0;
};

// Exhaustive search of V over the magnitude x phase product grid for fixed
// powers, maximizing relay EE subject to the BS, relay-power and rate
// constraints. Ties keep the lexicographically first grid point.
template <typename Scalar>
RelayGridResult<Scalar> relay_grid_search(const ChannelRealization<Scalar>& ch,
                                          const SystemConfig& config,
                                          const PowerAllocation<Scalar>& powers,
                                          const RelayGridSpec& grid, const RelayNoiseModel& noise) {
  const Eigen::Index n = ch.elements();
  if (n > grid.max_elements) throw GridCapExceeded("relay grid search: N exceeds the element cap");
  if (grid.magnitude_levels < 2 || grid.phase_levels < 1)
    throw InvalidArgument("relay grid search: need >= 2 magnitudes and >= 1 phase");

  const auto targets = config.rate_targets();
  detail::RelayContext<Scalar> ctx{ch, config, noise, relay_signal_costs(ch),
                                   Vector<Scalar>(ch.users())};
  for (Eigen::Index k = 0; k < ch.users(); ++k) ctx.min_rates(k) = Scalar(targets[k]);

  // Largest magnitude allowed by the relay budget at the QoS floors.
  Vector<Scalar> floors(ch.users());
  for (Eigen::Index k = 0; k < ch.users(); ++k)
    floors(k) = qos_floor(ctx.min_rates(k), Scalar(config.noise_power));
  const Scalar headroom = Scalar(config.relay_max()) - ctx.signal_costs.dot(floors);
  const Scalar v_max =
      headroom > Scalar(0) ? std::sqrt(headroom / Scalar(noise.relay_noise_power)) : Scalar(0);

  const int per_element = grid.magnitude_levels * grid.phase_levels;
  std::vector<Complex<Scalar>> levels;
  levels.reserve(static_cast<size_t>(per_element));
  for (int a = 0; a < grid.magnitude_levels; ++a) {
    const Scalar mag = v_max * Scalar(a) / Scalar(grid.magnitude_levels - 1);
    for (int b = 0; b < grid.phase_levels; ++b)
      levels.push_back(std::polar(mag, kTwoPi<Scalar> * Scalar(b) / Scalar(grid.phase_levels)));
  }

  RelayGridResult<Scalar> result;
  std::vector<int> index(static_cast<size_t>(n), 0);
  CVector<Scalar> v(n);
  while (true) {
    for (Eigen::Index e = 0; e < n; ++e) v(e) = levels[static_cast<size_t>(index[e])];
    ++result.points;
    const auto ev = detail::evaluate_relay(ctx, v, powers.p, static_cast<const Vector<Scalar>*>(nullptr));
    if (ev.feasible && (!result.best || ev.ee > result.evaluation.ee)) {
      result.best = RelayGains<Scalar>{v};
      result.evaluation = ev;
    }
    // Odometer increment, last element fastest.
    Eigen::Index e = n - 1;
    while (e >= 0 && ++index[static_cast<size_t>(e)] == per_element) {
      index[static_cast<size_t>(e)] = 0;
      --e;
    }
    if (e < 0) break;
  }
  return result;
}

// Alternating optimization of the AF benchmark: exhaustive V search for
// fixed powers, then Dinkelbach for fixed V over both the BS and relay power
// budgets. Powers start at P_max / K and are halved until some V is feasible.
template <typename Scalar>
RelayOutcome<Scalar> optimize_relay(const ChannelRealization<Scalar>& ch, const SystemConfig& config,
                                    const RelayGridSpec& grid = {},
                                    const RelayNoiseModel& noise_model = {NoiseAmplification::squared, -1.0},
                                    double epsilon = 1e-3, int max_outer_iters = 50) {
  RelayNoiseModel noise = noise_model;
  if (!(noise.relay_noise_power > 0)) noise.relay_noise_power = config.relay_noise();
  const Eigen::Index k = ch.users();
  const Scalar sigma2 = Scalar(config.noise_power);
  const auto targets = config.rate_targets();

  RelayOutcome<Scalar> out;
  PowerAllocation<Scalar> powers =
      PowerAllocation<Scalar>::uniform(k, Scalar(config.max_tx_power) / Scalar(k));

  RelayGridResult<Scalar> search;
  for (int attempt = 0; attempt < 200; ++attempt) {
    search = relay_grid_search(ch, config, powers, grid, noise);
    if (search.best) break;
    powers.p *= Scalar(0.5);
  }
  if (!search.best) throw Infeasible("relay: no feasible gain matrix on the grid");
  out.grid_points = search.points;

  const Vector<Scalar> signal_costs = relay_signal_costs(ch);
  const Scalar ln2 = std::log(Scalar(2));
  Scalar best = search.evaluation.ee;
  Scalar last = best;
  RelayGains<Scalar> gains = *search.best;

  for (int outer = 1; outer <= max_outer_iters; ++outer) {
    // Power step for fixed V.
    const CMatrix<Scalar> e = ch.h2 * gains.v.asDiagonal() * ch.h1;
    const auto bs_costs = right_inverse_column_costs(e);
    if (!bs_costs) throw RankDeficient("relay: effective channel rank deficient");
    FractionalPowerProblem<Scalar> problem;
    problem.noise = relay_noise_levels(gains, ch, sigma2, noise);
    problem.floors.resize(k);
    for (Eigen::Index u = 0; u < k; ++u)
      problem.floors(u) = problem.noise(u) * std::expm1(Scalar(targets[u]) * ln2);
    problem.slope = (Scalar(config.amplifier_inefficiency) +
                     Scalar(config.relay_amplifier_inefficiency) * signal_costs.array())
                        .matrix();
    const Scalar noise_relay_power = Scalar(noise.relay_noise_power) * gains.v.squaredNorm();
    problem.static_power = Scalar(relay_static_power(config)) +
                           Scalar(config.relay_amplifier_inefficiency) * noise_relay_power;
    problem.budgets.push_back({*bs_costs, Scalar(config.max_tx_power)});
    problem.budgets.push_back({signal_costs, Scalar(config.relay_max()) - noise_relay_power});

    const auto dink = dinkelbach(problem, Scalar(1e-9));
    detail::RelayContext<Scalar> ctx{ch, config, noise, signal_costs, Vector<Scalar>(k)};
    for (Eigen::Index u = 0; u < k; ++u) ctx.min_rates(u) = Scalar(targets[u]);
    const auto ev = detail::evaluate_relay(ctx, gains.v, dink.p, &*bs_costs);
    if (ev.feasible && ev.ee >= best) {
      powers.p = dink.p;
      best = ev.ee;
    }

    // V step for fixed powers; the current V is on the grid, so this never
    // decreases the objective.
    search = relay_grid_search(ch, config, powers, grid, noise);
    Scalar value = best;
    if (search.best && search.evaluation.ee > best) {
      gains = *search.best;
      value = search.evaluation.ee;
    }
    out.outer_iterations = outer;
    out.history.push_back(value);
    best = value;
    const bool settled = std::abs(value - last) <= Scalar(epsilon) * std::max(std::abs(last), Scalar(1e-300));
    last = value;
    if (settled) {
      out.converged = true;
      break;
    }
  }

  detail::RelayContext<Scalar> ctx{ch, config, noise, signal_costs, Vector<Scalar>(k)};
  for (Eigen::Index u = 0; u < k; ++u) ctx.min_rates(u) = Scalar(targets[u]);
  const auto final_eval = detail::evaluate_relay(ctx, gains.v, powers.p, static_cast<const Vector<Scalar>*>(nullptr));
  out.gains = gains;
  out.powers = powers;
  out.feasible = final_eval.feasible;
  out.se = final_eval.rate;
  out.ee = final_eval.ee;
  out.total_power = final_eval.total_power;
  out.bs_tx_power = final_eval.bs_power;
  out.relay_tx_power = final_eval.relay_power;
  return out;
}

}  // namespace ris
