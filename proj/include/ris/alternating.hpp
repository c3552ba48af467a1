#pragma once

#include <algorithm>
#include <cmath>

#include "ris/metrics.hpp"
#include "ris/phase_gradient.hpp"
#include "ris/phase_sfp.hpp"
#include "ris/power_dinkelbach.hpp"

namespace ris {

enum class PhaseMethod { gradient, sfp };
enum class Objective { ee, sum_rate };
enum class QosPolicy { strict, relax_on_infeasible };
enum class StopRule {
  relative,        // |f(l+1) - f(l)| / max(f(l), 1) < epsilon
  squared_change,  // |f(l+1) - f(l)|^2 < epsilon
};

struct SolverSpec {
  PhaseMethod phase_method = PhaseMethod::sfp;
  Objective objective = Objective::ee;
  double epsilon = 1e-3;         // outer stopping threshold
  double phase_epsilon = 1e-6;   // inner ||Phi(t+1) - Phi(t)||^2 threshold
  double power_epsilon = 1e-9;   // Dinkelbach tolerance (normalized)
  int max_outer_iters = 50;
  int max_phase_iters = 500;
  QosPolicy qos_policy = QosPolicy::relax_on_infeasible;
  StopRule stop_rule = StopRule::relative;

  void validate() const {
    if (!(epsilon > 0) || !(phase_epsilon > 0) || !(power_epsilon > 0))
      throw InvalidArgument("SolverSpec: tolerances must be > 0");
    if (max_outer_iters < 1 || max_phase_iters < 1)
      throw InvalidArgument("SolverSpec: iteration caps must be >= 1");
  }
};

// Per-user rate of the orthogonal-channel, uniform-power genie:
// log2(1 + P_max / (K sigma^2)).
inline double genie_rate(const SystemConfig& config) {
  return std::log1p(config.max_tx_power / (config.users * config.noise_power)) / std::log(2.0);
}

template <typename Scalar>
PhaseSolveReport<Scalar> optimize_phases(PhaseMethod method, const PhaseProfile<Scalar>& start,
                                         const PowerAllocation<Scalar>& powers,
                                         const ChannelRealization<Scalar>& ch, Scalar epsilon,
                                         int max_iters) {
  if (method == PhaseMethod::sfp) return optimize_phases_sfp(start, powers, ch, epsilon, max_iters);
  return optimize_phases_gradient(start, powers, ch, epsilon, max_iters);
}

template <typename Scalar>
PowerFeasibleSet<Scalar> power_feasible_set(const ChannelRealization<Scalar>& ch,
                                            const PhaseProfile<Scalar>& phases,
                                            const Vector<Scalar>& floors, Scalar p_max) {
  return {floors, zf_power_costs(ch, phases), p_max};
}

namespace detail {

template <typename Scalar>
Vector<Scalar> qos_floors(const SystemConfig& config) {
  const auto targets = config.rate_targets();
  Vector<Scalar> floors(config.users);
  for (int k = 0; k < config.users; ++k)
    floors(k) = qos_floor(Scalar(targets[k]), Scalar(config.noise_power));
  return floors;
}

template <typename Scalar>
bool outer_converged(const SolverSpec& spec, Scalar previous, Scalar current) {
  const Scalar delta = std::abs(current - previous);
  if (spec.stop_rule == StopRule::squared_change) return delta * delta < Scalar(spec.epsilon);
  return delta / std::max(previous, Scalar(1)) < Scalar(spec.epsilon);
}

// One run of the alternating loop for the given floors. Returns an outcome
// with feasible = false when the floors cannot be met at the first phase
// configuration.
template <typename Scalar>
SolveOutcome<Scalar> alternate(const ChannelRealization<Scalar>& ch, const SystemConfig& config,
                               const SolverSpec& spec, const Vector<Scalar>& floors) {
  const Eigen::Index k = config.users;
  const Scalar p_max = Scalar(config.max_tx_power);
  const Scalar slope =
      spec.objective == Objective::sum_rate ? Scalar(0) : Scalar(config.amplifier_inefficiency);
  const Scalar phase_eps = Scalar(spec.phase_epsilon);

  auto metric = [&](const Vector<Scalar>& p) {
    return spec.objective == Objective::sum_rate
               ? spectral_efficiency(p, Scalar(config.noise_power))
               : energy_efficiency(p, config);
  };

  SolveOutcome<Scalar> out;
  PhaseProfile<Scalar> phases = PhaseProfile<Scalar>::constant(config.ris_elements, kPi<Scalar> / 2);
  PowerAllocation<Scalar> powers = PowerAllocation<Scalar>::uniform(k, p_max / Scalar(k));
  bool have_iterate = false;
  Scalar best = 0;

  for (int outer = 1; outer <= spec.max_outer_iters; ++outer) {
    auto phase_report =
        optimize_phases(spec.phase_method, phases, powers, ch, phase_eps, spec.max_phase_iters);
    PowerFeasibleSet<Scalar> set = power_feasible_set(ch, phase_report.phases, floors, p_max);

    if (!set.feasible()) {
      // Feasibility check of the floors themselves: minimize the BS power
      // needed by the floors before giving up.
      const PowerAllocation<Scalar> floor_powers{floors};
      auto retry = optimize_phases(spec.phase_method, phase_report.phases, floor_powers, ch, phase_eps,
                                   spec.max_phase_iters);
      PowerFeasibleSet<Scalar> retry_set = power_feasible_set(ch, retry.phases, floors, p_max);
      if (!retry_set.feasible()) {
        if (!have_iterate) {
          out.phases = retry.phases;
          out.powers = floor_powers;
          out.outer_iterations = outer;
          out.feasible = false;
          evaluate_outcome(out, ch, config);
          return out;
        }
        break;  // keep the last feasible iterate
      }
      phase_report = std::move(retry);
      set = std::move(retry_set);
    }

    auto problem = make_power_problem(set, config, slope);
    const auto dink = dinkelbach(problem, Scalar(spec.power_epsilon));
    Vector<Scalar> p_new = dink.p;
    Scalar value = metric(p_new);
    // The previous powers stay feasible for the new phases (F did not
    // increase), so never step back because of Dinkelbach's tolerance.
    if (have_iterate && value < best) {
      p_new = powers.p;
      value = best;
    }

    phases = phase_report.phases;
    powers.p = p_new;
    out.outer_iterations = outer;
    out.history.push_back(value);
    const bool done = have_iterate && outer_converged(spec, best, value);
    best = value;
    have_iterate = true;
    if (done) {
      out.converged = true;
      break;
    }
  }

  out.phases = phases;
  out.powers = powers;
  out.feasible = true;
  evaluate_outcome(out, ch, config);
  return out;
}

}  // namespace detail

// Alternating maximization of EE (or of the sum rate, which zeroes xi in the
// power step) over phases and powers. Starts from Theta = pi/2 and uniform
// powers P_max / K. With QosPolicy::relax_on_infeasible, an infeasible QoS
// problem is re-solved with R_min = 0 and flagged qos_relaxed.
template <typename Scalar>
SolveOutcome<Scalar> maximize(const ChannelRealization<Scalar>& ch, const SystemConfig& config,
                              const SolverSpec& spec) {
  spec.validate();
  auto out = detail::alternate(ch, config, spec, detail::qos_floors<Scalar>(config));
  if (!out.feasible && spec.qos_policy == QosPolicy::relax_on_infeasible) {
    out = detail::alternate(ch, config, spec, Vector<Scalar>::Zero(config.users).eval());
    out.qos_relaxed = true;
  }
  return out;
}

template <typename Scalar>
SolveOutcome<Scalar> maximize_ee(const ChannelRealization<Scalar>& ch, const SystemConfig& config,
                                 SolverSpec spec) {
  spec.objective = Objective::ee;
  return maximize(ch, config, spec);
}

template <typename Scalar>
SolveOutcome<Scalar> maximize_se(const ChannelRealization<Scalar>& ch, const SystemConfig& config,
                                 SolverSpec spec) {
  spec.objective = Objective::sum_rate;
  return maximize(ch, config, spec);
}

}  // namespace ris
