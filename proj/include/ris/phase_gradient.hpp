#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ris/phase_objective.hpp"

namespace ris {

enum class PhaseStatus { converged, max_iterations, stalled };

template <typename Scalar>
struct PhaseSolveReport {
  PhaseProfile<Scalar> phases;
  Scalar objective = 0;
  int iterations = 0;
  PhaseStatus status = PhaseStatus::max_iterations;
  // Objective after every accepted iteration, starting with the initial value.
  std::vector<Scalar> trace;
};

// Second-order Taylor model of h(mu) = F(theta + mu d) around mu = 0, written
// as h(mu) ~ z0 - z1 mu + z2 mu^2 (z1 = -h'(0), z2 = h''(0) / 2).
template <typename Scalar>
struct QuadraticStepModel {
  Scalar z0 = 0;
  Scalar z1 = 0;
  Scalar z2 = 0;

  Scalar operator()(Scalar mu) const { return z0 - z1 * mu + z2 * mu * mu; }

  // Minimizer z1 / (2 z2), defined when the model decreases with positive
  // curvature.
  std::optional<Scalar> minimizer() const {
    if (z1 >= Scalar(0) && z2 > Scalar(0)) return z1 / (Scalar(2) * z2);
    return std::nullopt;
  }
};

// With x1 = d o x and x2 = d o d o x (x = exp(-j theta)):
//   h'(0)  = -2 Im(x1^H A x)
//   h''(0) =  2 (x1^H A x1 - Re(x2^H A x)).
template <typename Scalar>
QuadraticStepModel<Scalar> quadratic_step_model(const PhaseQuadraticForm<Scalar>& form,
                                                const Vector<Scalar>& theta,
                                                const Vector<Scalar>& direction) {
  const CVector<Scalar> x = inverse_phase_vector(theta);
  const CVector<Scalar> dc = direction.template cast<Complex<Scalar>>();
  const CVector<Scalar> x1 = dc.cwiseProduct(x);
  const CVector<Scalar> x2 = dc.cwiseProduct(x1);
  const CVector<Scalar> ax = form.reduced() * x;
  QuadraticStepModel<Scalar> model;
  model.z0 = x.dot(ax).real();
  model.z1 = Scalar(2) * x1.dot(ax).imag();
  model.z2 = x1.dot(form.reduced() * x1).real() - x2.dot(ax).real();
  return model;
}

template <typename Scalar>
struct StepResult {
  Scalar mu = 0;
  Scalar value = 0;  // h(mu)
  bool stalled = true;
  bool used_model = false;
};

// Step length along a descent direction. Takes the quadratic-model minimizer
// when the model is valid and it decreases F; otherwise backtracks on the
// true h(mu) from the model step (or from a half turn of the largest
// component) until h(mu) < h(0). mu = 0 with stalled = true if nothing
// decreases.
template <typename Scalar>
StepResult<Scalar> step_size(const PhaseObjective<Scalar>& objective, const Vector<Scalar>& theta,
                             const Vector<Scalar>& direction, Scalar value0, int max_halvings = 60) {
  StepResult<Scalar> out;
  out.value = value0;
  const Scalar dmax = direction.cwiseAbs().maxCoeff();
  if (!(dmax > Scalar(0))) return out;

  auto h = [&](Scalar mu) { return objective.value(theta + mu * direction); };

  Scalar mu = kPi<Scalar> / dmax;
  if (const auto& form = objective.quadratic_form()) {
    const auto model = quadratic_step_model(*form, theta, direction);
    if (auto star = model.minimizer(); star && *star > Scalar(0)) {
      mu = *star;
      out.used_model = true;
    }
  }
  for (int i = 0; i <= max_halvings; ++i) {
    const Scalar v = h(mu);
    if (v < value0) {
      out.mu = mu;
      out.value = v;
      out.stalled = false;
      return out;
    }
    mu *= Scalar(0.5);
    out.used_model = false;
  }
  return out;
}

template <typename Scalar>
struct DirectionResult {
  Vector<Scalar> d;
  Scalar beta = 0;
  bool restarted = false;      // safeguard replaced the PRP direction by -q
  bool zero_gradient = false;  // ||q_old|| = 0
};

// Polak-Ribiere-Polyak update d = -q_new + beta d_old with
// beta = (q_new - q_old)^T q_new / ||q_old||^2, replaced by -q_new whenever it
// fails to be a strict descent direction.
template <typename Scalar>
DirectionResult<Scalar> prp_direction(const Vector<Scalar>& q_new, const Vector<Scalar>& q_old,
                                      const Vector<Scalar>& d_old) {
  DirectionResult<Scalar> out;
  const Scalar old_norm2 = q_old.squaredNorm();
  if (!(old_norm2 > Scalar(0))) {
    out.d = Vector<Scalar>::Zero(q_new.size());
    out.zero_gradient = true;
    return out;
  }
  out.beta = (q_new - q_old).dot(q_new) / old_norm2;
  out.d = -q_new + out.beta * d_old;
  if (!(q_new.dot(out.d) < Scalar(0))) {
    out.d = -q_new;
    out.restarted = true;
  }
  return out;
}

// Minimizes F over the phases by safeguarded PRP conjugate gradient. Stops when
// ||Phi(t+1) - Phi(t)||^2 < epsilon, after max_iters, or after two consecutive
// steps that fail to decrease F (stalled). F never increases.
template <typename Scalar>
PhaseSolveReport<Scalar> optimize_phases_gradient(const PhaseProfile<Scalar>& start,
                                                  const PowerAllocation<Scalar>& powers,
                                                  const ChannelRealization<Scalar>& ch,
                                                  Scalar epsilon, int max_iters = 500) {
  const PhaseObjective<Scalar> objective(ch, powers.p);
  Vector<Scalar> theta = start.theta();
  Scalar value = objective.value(theta);
  Vector<Scalar> q = objective.gradient(theta);
  Vector<Scalar> d = -q;

  PhaseSolveReport<Scalar> report;
  report.trace.push_back(value);
  int stalls = 0;
  for (int t = 0; t < max_iters; ++t) {
    report.iterations = t + 1;
    if (!(q.squaredNorm() > Scalar(0))) {
      report.status = PhaseStatus::converged;
      break;
    }
    const auto step = step_size(objective, theta, d, value);
    if (step.stalled) {
      if (++stalls >= 2) {
        report.status = PhaseStatus::stalled;
        break;
      }
      d = -q;
      continue;
    }
    stalls = 0;
    const Vector<Scalar> next = theta + step.mu * d;
    const Scalar change = phase_change(next, theta);
    theta = next;
    value = step.value;
    report.trace.push_back(value);

    const Vector<Scalar> q_next = objective.gradient(theta);
    d = prp_direction(q_next, q, d).d;
    q = q_next;
    if (change < epsilon) {
      report.status = PhaseStatus::converged;
      break;
    }
  }
  report.phases = PhaseProfile<Scalar>(theta);
  report.objective = value;
  return report;
}

}  // namespace ris
