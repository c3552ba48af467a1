#pragma once

#include <cmath>

#include "ris/phase_gradient.hpp"
#include "ris/phase_objective.hpp"

namespace ris {

// Majorizer of y^H A y at an anchor y_t, with M = lambda_max I:
//   f(y | y_t) = lambda_max ||y||^2 - 2 Re(y^H c) + y_t^H (M - A) y_t,
//   c = (M - A) y_t.
// Only the N diagonal slots of y are nonzero, so c is stored as the N-vector
// of its entries at those slots.
template <typename Scalar>
struct SurrogateModel {
  Scalar lambda_max = 0;
  CVector<Scalar> c;
  PhaseProfile<Scalar> anchor;
  Scalar anchor_value = 0;  // y_t^H A y_t

  // y_t^H (M - A) y_t = Re(y_t^H c).
  Scalar offset() const { return inverse_phase_vector(anchor.theta()).dot(c).real(); }
};

// Largest eigenvalue of A, computed as (sigma_max(H1^+) sigma_max(B))^2.
template <typename Scalar>
Scalar lambda_max(const ChannelRealization<Scalar>& ch, const PowerAllocation<Scalar>& powers) {
  return PhaseQuadraticForm<Scalar>(ch, powers.p).lambda_max();
}

template <typename Scalar>
SurrogateModel<Scalar> build_surrogate(const PhaseQuadraticForm<Scalar>& form,
                                       const PhaseProfile<Scalar>& anchor) {
  SurrogateModel<Scalar> model;
  model.lambda_max = form.lambda_max();
  model.anchor = anchor;
  const CVector<Scalar> x = inverse_phase_vector(anchor.theta());
  const CVector<Scalar> ax = form.reduced() * x;
  model.c = model.lambda_max * x - ax;
  model.anchor_value = x.dot(ax).real();
  return model;
}

// f(y | anchor) for a feasible y given by its nonzero entries x (unit modulus
// at the diagonal slots). ||y||^2 is taken from x so infeasible inputs are
// still evaluated consistently.
template <typename Scalar>
Scalar surrogate_value(const CVector<Scalar>& x, const SurrogateModel<Scalar>& model) {
  return model.lambda_max * x.squaredNorm() - Scalar(2) * x.dot(model.c).real() + model.offset();
}

template <typename Scalar>
Scalar surrogate_value(const PhaseProfile<Scalar>& phases, const SurrogateModel<Scalar>& model) {
  return surrogate_value(inverse_phase_vector(phases.theta()), model);
}

template <typename Scalar>
struct SfpUpdate {
  PhaseProfile<Scalar> phases;
  int degenerate = 0;  // slots with c_n = 0 that kept the anchor phase
};

// Closed-form minimizer of the surrogate over the feasible set:
// x_n = exp(j arg c_n), i.e. theta_n = -arg(c_n). A zero c_n leaves every
// phase optimal for that slot; the anchor phase is kept.
template <typename Scalar>
SfpUpdate<Scalar> sfp_update(const SurrogateModel<Scalar>& model) {
  const Vector<Scalar>& anchor = model.anchor.theta();
  Vector<Scalar> theta(anchor.size());
  SfpUpdate<Scalar> out;
  for (Eigen::Index n = 0; n < anchor.size(); ++n) {
    if (std::abs(model.c(n)) == Scalar(0)) {
      theta(n) = anchor(n);
      ++out.degenerate;
    } else {
      theta(n) = -std::arg(model.c(n));
    }
  }
  out.phases = PhaseProfile<Scalar>(theta);
  return out;
}

// Sequential (majorize-minimize) phase optimization for fixed powers. The
// objective sequence never increases. Requires K = N.
template <typename Scalar>
PhaseSolveReport<Scalar> optimize_phases_sfp(const PhaseProfile<Scalar>& start,
                                             const PowerAllocation<Scalar>& powers,
                                             const ChannelRealization<Scalar>& ch, Scalar epsilon,
                                             int max_iters = 500) {
  const PhaseQuadraticForm<Scalar> form(ch, powers.p);
  PhaseSolveReport<Scalar> report;
  PhaseProfile<Scalar> current = start;
  Scalar value = form.value_at(current.theta());
  report.trace.push_back(value);
  for (int t = 0; t < max_iters; ++t) {
    report.iterations = t + 1;
    const auto model = build_surrogate(form, current);
    const auto next = sfp_update(model).phases;
    const Scalar next_value = form.value_at(next.theta());
    const Scalar change = phase_change(next.theta(), current.theta());
    // Rounding can push an already stationary point up by an ulp; keep the
    // better iterate so the sequence is monotone.
    if (next_value <= value) {
      current = next;
      value = next_value;
    }
    report.trace.push_back(value);
    if (change < epsilon) {
      report.status = PhaseStatus::converged;
      break;
    }
  }
  report.phases = current;
  report.objective = value;
  return report;
}

}  // namespace ris
