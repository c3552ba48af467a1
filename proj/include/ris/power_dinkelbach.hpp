#pragma once

#include <cmath>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "ris/metrics.hpp"
#include "ris/system_config.hpp"
#include "ris/types.hpp"

namespace ris {

// Minimum power that meets a rate target over a ZF link: sigma^2 (2^R - 1).
template <typename Scalar>
Scalar qos_floor(Scalar min_rate, Scalar sigma2) {
  return sigma2 * std::expm1(min_rate * std::log(Scalar(2)));
}

// Power set of the RIS problem for fixed phases:
// p_k >= p_min_k and sum_k c_k p_k <= p_max.
template <typename Scalar>
struct PowerFeasibleSet {
  Vector<Scalar> p_min;
  Vector<Scalar> c;
  Scalar p_max = 0;

  Scalar floor_cost() const { return c.dot(p_min); }
  bool feasible() const { return floor_cost() <= p_max; }
};

template <typename Scalar>
struct LinearBudget {
  Vector<Scalar> weights;
  Scalar budget = 0;
};

// max  sum_k log2(1 + p_k / noise_k) / (slope^T p + static_power)
// s.t. p_k >= floors_k,  weights_j^T p <= budget_j for every budget j.
//
// The RIS problem has one budget and noise_k = sigma^2; the relay benchmark
// adds per-user noise amplification and a second (relay) budget.
template <typename Scalar>
struct FractionalPowerProblem {
  Vector<Scalar> noise;
  Vector<Scalar> floors;
  Vector<Scalar> slope;
  Scalar static_power = 0;
  std::vector<LinearBudget<Scalar>> budgets;

  Eigen::Index users() const { return noise.size(); }

  Scalar numerator(const Vector<Scalar>& p) const {
    Scalar r = 0;
    for (Eigen::Index k = 0; k < p.size(); ++k) r += std::log1p(p(k) / noise(k));
    return r / std::log(Scalar(2));
  }
  Scalar denominator(const Vector<Scalar>& p) const { return slope.dot(p) + static_power; }
  Scalar ratio(const Vector<Scalar>& p) const { return numerator(p) / denominator(p); }

  bool feasible() const {
    for (const auto& b : budgets)
      if (b.weights.dot(floors) > b.budget) return false;
    return true;
  }
};

template <typename Scalar>
FractionalPowerProblem<Scalar> make_power_problem(const PowerFeasibleSet<Scalar>& set,
                                                  const SystemConfig& config,
                                                  Scalar amplifier_inefficiency) {
  FractionalPowerProblem<Scalar> problem;
  const Eigen::Index k = set.c.size();
  problem.noise = Vector<Scalar>::Constant(k, Scalar(config.noise_power));
  problem.floors = set.p_min;
  problem.slope = Vector<Scalar>::Constant(k, amplifier_inefficiency);
  problem.static_power = Scalar(static_power(config));
  problem.budgets.push_back({set.c, set.p_max});
  return problem;
}

template <typename Scalar>
FractionalPowerProblem<Scalar> make_power_problem(const PowerFeasibleSet<Scalar>& set,
                                                  const SystemConfig& config) {
  return make_power_problem(set, config, Scalar(config.amplifier_inefficiency));
}

namespace detail {

// Maximizer of the Lagrangian with the first `fixed.size()` budget
// multipliers given; the remaining budgets are enforced recursively by
// bisection on their multipliers (the budget usage is nonincreasing in each
// multiplier, so the root is bracketed by doubling).
template <typename Scalar>
Vector<Scalar> solve_with_multipliers(const FractionalPowerProblem<Scalar>& problem, Scalar lambda,
                                      std::vector<Scalar>& multipliers) {
  const size_t level = multipliers.size();
  const Eigen::Index k = problem.users();
  if (level == problem.budgets.size()) {
    const Scalar ln2 = std::log(Scalar(2));
    Vector<Scalar> p(k);
    for (Eigen::Index u = 0; u < k; ++u) {
      Scalar price = lambda * problem.slope(u);
      for (size_t j = 0; j < multipliers.size(); ++j)
        price += multipliers[j] * problem.budgets[j].weights(u);
      const Scalar level_power = price > Scalar(0) ? Scalar(1) / (ln2 * price) - problem.noise(u)
                                                   : std::numeric_limits<Scalar>::infinity();
      p(u) = std::max(level_power, problem.floors(u));
    }
    return p;
  }

  const auto& budget = problem.budgets[level];
  auto usage = [&](Scalar nu) {
    multipliers.push_back(nu);
    Vector<Scalar> p = solve_with_multipliers(problem, lambda, multipliers);
    multipliers.pop_back();
    return std::pair{budget.weights.dot(p), p};
  };

  auto [used0, p0] = usage(Scalar(0));
  if (std::isfinite(used0) && used0 <= budget.budget) return p0;

  // Bracket the multiplier geometrically: usage(hi) <= budget < usage(lo).
  const Scalar wmax = budget.weights.maxCoeff();
  if (!(wmax > Scalar(0))) throw InvalidArgument("power allocation: unbounded budget");
  Scalar hi = Scalar(k) / (std::log(Scalar(2)) * std::max(budget.budget, std::numeric_limits<Scalar>::min()));
  Scalar lo = 0;
  auto [used_hi, p_hi] = usage(hi);
  int guard = 0;
  while (!(used_hi <= budget.budget)) {
    lo = hi;
    hi *= Scalar(2);
    std::tie(used_hi, p_hi) = usage(hi);
    if (++guard > 4000) throw Infeasible("power allocation: budget cannot be met");
  }
  if (lo == Scalar(0)) {
    // Shrink towards the root from above.
    Scalar probe = hi;
    for (guard = 0; guard < 4000; ++guard) {
      const Scalar half = probe * Scalar(0.5);
      const auto [used_half, p_half] = usage(half);
      if (!(used_half <= budget.budget)) {
        lo = half;
        break;
      }
      probe = half;
      hi = half;
      used_hi = used_half;
      p_hi = p_half;
    }
  }
  for (int it = 0; it < 400; ++it) {
    if (std::abs(used_hi - budget.budget) <= Scalar(1e-12) * budget.budget) break;
    const Scalar mid = (lo > Scalar(0)) ? std::sqrt(lo * hi) : Scalar(0.5) * hi;
    if (!(mid > lo && mid < hi)) break;
    const auto [used_mid, p_mid] = usage(mid);
    if (used_mid <= budget.budget) {
      hi = mid;
      used_hi = used_mid;
      p_hi = p_mid;
    } else {
      lo = mid;
    }
  }
  return p_hi;
}

}  // namespace detail

// Maximizer of sum log2(1 + p/noise) - lambda (slope^T p + static) over the
// feasible set: p_k = max(1 / (ln2 (lambda slope_k + sum_j nu_j w_jk)) - noise_k,
// floor_k), with the budget multipliers nu_j >= 0 found by bisection so that
// complementary slackness holds. Throws Infeasible when the floors exceed a
// budget.
template <typename Scalar>
Vector<Scalar> inner_concave_solve(Scalar lambda, const FractionalPowerProblem<Scalar>& problem) {
  if (!problem.feasible()) throw Infeasible("power allocation: QoS floors exceed the power budget");
  std::vector<Scalar> multipliers;
  multipliers.reserve(problem.budgets.size());
  return detail::solve_with_multipliers(problem, lambda, multipliers);
}

template <typename Scalar>
Vector<Scalar> inner_concave_solve(Scalar lambda, const PowerFeasibleSet<Scalar>& set,
                                   const SystemConfig& config) {
  return inner_concave_solve(lambda, make_power_problem(set, config));
}

template <typename Scalar>
struct DinkelbachResult {
  Vector<Scalar> p;
  Scalar lambda = 0;  // ratio at p (bits/s/Hz per watt, bandwidth-free)
  int iterations = 0;
  std::vector<Scalar> lambda_history;  // lambda_1, lambda_2, ...
  // N(p) - lambda_{i-1} D(p) at the returned p, divided by N(p_1).
  Scalar auxiliary = 0;
  bool converged = false;
};

// Dinkelbach's method from lambda_0 = 0. The tolerance is applied to the
// ratio normalized by the first iterate (lambda / lambda_1 scale), so it is
// independent of the channel and power units: stop once both the normalized
// lambda increment and the normalized auxiliary value drop below epsilon.
// A zero slope (sum-rate) makes the argmax lambda-independent and returns
// after one inner solve.
template <typename Scalar>
DinkelbachResult<Scalar> dinkelbach(const FractionalPowerProblem<Scalar>& problem, Scalar epsilon,
                                    int max_iters = 100) {
  DinkelbachResult<Scalar> out;
  Scalar lambda = 0;
  out.p = inner_concave_solve(lambda, problem);
  out.iterations = 1;
  const Scalar n1 = problem.numerator(out.p);
  const Scalar d1 = problem.denominator(out.p);
  out.lambda = n1 / d1;
  out.lambda_history.push_back(out.lambda);
  out.auxiliary = Scalar(1);
  if (problem.slope.isZero(0) || !(n1 > Scalar(0))) {
    out.auxiliary = 0;
    out.converged = true;
    return out;
  }
  const Scalar lambda_scale = n1 / d1;
  for (int i = 2; i <= max_iters; ++i) {
    const Scalar previous = out.lambda;
    Vector<Scalar> p = inner_concave_solve(previous, problem);
    const Scalar num = problem.numerator(p);
    const Scalar den = problem.denominator(p);
    out.p = std::move(p);
    out.lambda = num / den;
    out.iterations = i;
    out.lambda_history.push_back(out.lambda);
    out.auxiliary = (num - previous * den) / n1;
    if (std::abs(out.lambda - previous) / lambda_scale < epsilon &&
        std::abs(out.auxiliary) < epsilon) {
      out.converged = true;
      break;
    }
  }
  return out;
}

template <typename Scalar>
DinkelbachResult<Scalar> dinkelbach(const PowerFeasibleSet<Scalar>& set, const SystemConfig& config,
                                    Scalar epsilon) {
  return dinkelbach(make_power_problem(set, config), epsilon);
}

}  // namespace ris
