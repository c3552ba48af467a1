#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "ris/alternating.hpp"
#include "ris/linalg.hpp"
#include "ris/metrics.hpp"
#include "ris/phase_objective.hpp"
#include "ris/power_dinkelbach.hpp"

namespace ris {

struct GridSpec {
  int points_per_angle = 721;  // inclusive linspace over [0, 2pi]
  int points_per_power = 41;   // levels of the budget fraction and of each share
  int max_dim = 4;             // largest N accepted
  double budget = 1e8;         // evaluation cap
};

namespace detail {

inline double checked_grid_size(const GridSpec& grid, int free_angles, double power_points) {
  if (grid.points_per_angle < 2 || grid.points_per_power < 2)
    throw InvalidArgument("grid: need at least 2 points per axis");
  const double total = std::pow(double(grid.points_per_angle), free_angles) * power_points;
  if (total > grid.budget) throw BudgetExceeded("grid: evaluation budget exceeded");
  return total;
}

// Odometer over the angle grid with theta_1 fixed at 0. F and every rate are
// unchanged by a common phase rotation of all elements, so this loses nothing.
template <typename Scalar>
class AngleGrid {
 public:
  AngleGrid(Eigen::Index n, int points) : index_(static_cast<size_t>(n), 0), theta_(Vector<Scalar>::Zero(n)) {
    levels_.resize(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i) levels_[i] = kTwoPi<Scalar> * Scalar(i) / Scalar(points - 1);
  }

  const Vector<Scalar>& theta() const { return theta_; }

  bool next() {
    for (Eigen::Index e = theta_.size() - 1; e >= 1; --e) {
      auto& i = index_[static_cast<size_t>(e)];
      if (++i < levels_.size()) {
        theta_(e) = levels_[i];
        return true;
      }
      i = 0;
      theta_(e) = levels_[0];
    }
    return false;
  }

 private:
  std::vector<size_t> index_;
  std::vector<Scalar> levels_;
  Vector<Scalar> theta_;
};

// Budget shares w (summing to 1) on a stick-breaking grid with `levels`
// points per stick. K <= 3.
template <typename Scalar>
std::vector<Vector<Scalar>> share_grid(Eigen::Index k, int levels) {
  std::vector<Vector<Scalar>> out;
  auto frac = [&](int i) { return Scalar(i) / Scalar(levels - 1); };
  if (k == 1) {
    out.push_back(Vector<Scalar>::Ones(1));
  } else if (k == 2) {
    for (int a = 0; a < levels; ++a) out.push_back((Vector<Scalar>(2) << frac(a), 1 - frac(a)).finished());
  } else if (k == 3) {
    for (int a = 0; a < levels; ++a)
      for (int b = 0; b < levels; ++b) {
        const Scalar w1 = frac(a);
        const Scalar w2 = (1 - w1) * frac(b);
        out.push_back((Vector<Scalar>(3) << w1, w2, 1 - w1 - w2).finished());
      }
  } else {
    throw InvalidArgument("joint grid: K must be 1, 2 or 3");
  }
  return out;
}

}  // namespace detail

// Exhaustive minimization of F = tr(G P G^H) over a uniform angle grid for
// fixed powers. Returns the first minimizer in grid order.
template <typename Scalar>
std::pair<PhaseProfile<Scalar>, Scalar> phase_grid_min_F(const PowerAllocation<Scalar>& powers,
                                                         const ChannelRealization<Scalar>& ch,
                                                         const GridSpec& grid) {
  const Eigen::Index n = ch.elements();
  if (n > grid.max_dim) throw BudgetExceeded("phase grid: N exceeds max_dim");
  detail::checked_grid_size(grid, static_cast<int>(n - 1), 1.0);

  std::optional<PhaseQuadraticForm<Scalar>> form;
  if (ch.users() == n) form.emplace(ch, powers.p);

  detail::AngleGrid<Scalar> angles(n, grid.points_per_angle);
  Vector<Scalar> best_theta = angles.theta();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  do {
    const Vector<Scalar>& theta = angles.theta();
    Scalar value;
    if (form) {
      value = form->value_at(theta);
    } else {
      const CMatrix<Scalar> e = ch.h2 * PhaseProfile<Scalar>(theta).coefficients().asDiagonal() * ch.h1;
      const auto costs = right_inverse_column_costs(e);
      value = costs ? costs->dot(powers.p) : std::numeric_limits<Scalar>::infinity();
    }
    if (value < best) {
      best = value;
      best_theta = theta;
    }
  } while (angles.next());
  return {PhaseProfile<Scalar>(best_theta), best};
}

// Global maximum of EE (or SE) over the product of the angle grid and a power
// grid. Powers are parameterized on the budget boundary scaled by t:
// p_k = t w_k P_max / c_k(Theta), with t in [0, 1] and w on a grid of the
// simplex; points violating a rate floor are skipped. For the SE objective
// only t = 1 is searched (SE is increasing in every p_k). Requires K <= 3.
template <typename Scalar>
SolveOutcome<Scalar> joint_grid_max(const ChannelRealization<Scalar>& ch, const SystemConfig& config,
                                    Objective objective, const GridSpec& grid) {
  const Eigen::Index n = ch.elements();
  const Eigen::Index k = ch.users();
  if (n > grid.max_dim) throw BudgetExceeded("joint grid: N exceeds max_dim");
  if (k > 3) throw InvalidArgument("joint grid: K must be at most 3");

  const auto shares = detail::share_grid<Scalar>(k, grid.points_per_power);
  std::vector<Scalar> fractions;
  if (objective == Objective::sum_rate) {
    fractions.push_back(Scalar(1));
  } else {
    for (int i = 1; i < grid.points_per_power; ++i)
      fractions.push_back(Scalar(i) / Scalar(grid.points_per_power - 1));
  }
  detail::checked_grid_size(grid, static_cast<int>(n - 1), double(shares.size() * fractions.size()));

  const Scalar sigma2 = Scalar(config.noise_power);
  const Scalar p_max = Scalar(config.max_tx_power);
  const Scalar bw = Scalar(config.bandwidth);
  const Scalar xi = Scalar(config.amplifier_inefficiency);
  const Scalar fixed = Scalar(static_power(config));
  const Scalar ln2 = std::log(Scalar(2));
  const auto targets = config.rate_targets();
  Vector<Scalar> floors(k);
  for (Eigen::Index u = 0; u < k; ++u) floors(u) = qos_floor(Scalar(targets[u]), sigma2);

  SolveOutcome<Scalar> out;
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  Vector<Scalar> best_theta;
  Vector<Scalar> best_p;

  detail::AngleGrid<Scalar> angles(n, grid.points_per_angle);
  Vector<Scalar> p(k);
  do {
    const Vector<Scalar>& theta = angles.theta();
    const CMatrix<Scalar> e = ch.h2 * PhaseProfile<Scalar>(theta).coefficients().asDiagonal() * ch.h1;
    const auto costs = right_inverse_column_costs(e);
    if (!costs) continue;
    for (const auto& w : shares) {
      for (Scalar t : fractions) {
        bool ok = true;
        for (Eigen::Index u = 0; u < k; ++u) {
          p(u) = t * w(u) * p_max / (*costs)(u);
          if (p(u) < floors(u) * (Scalar(1) - Scalar(1e-12))) ok = false;
        }
        if (!ok) continue;
        Scalar rate = 0;
        for (Eigen::Index u = 0; u < k; ++u) rate += std::log1p(p(u) / sigma2);
        rate /= ln2;
        const Scalar value =
            objective == Objective::sum_rate ? rate : bw * rate / (xi * p.sum() + fixed);
        if (value > best) {
          best = value;
          best_theta = theta;
          best_p = p;
        }
      }
    }
  } while (angles.next());

  if (!std::isfinite(best)) {
    out.phases = PhaseProfile<Scalar>(angles.theta());
    out.powers = PowerAllocation<Scalar>{floors};
    out.feasible = false;
    return out;
  }
  out.phases = PhaseProfile<Scalar>(best_theta);
  out.powers = PowerAllocation<Scalar>{best_p};
  out.feasible = true;
  out.converged = true;
  evaluate_outcome(out, ch, config);
  out.history.push_back(objective == Objective::sum_rate ? out.se : out.ee);
  return out;
}

}  // namespace ris
