// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ris/alternating.hpp"
#include "ris/experiment.hpp"
#include "ris/oracle.hpp"
#include "ris/phase_sfp.hpp"
#include "ris/power_dinkelbach.hpp"
#include "ris/relay.hpp"
#include "test_util.hpp"

using namespace ris;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Normalized channels (unit path gain), fixed noise, default hardware
// dissipation figures.
SystemConfig scaled_scenario(int m, int k, int n, double sigma2) {
  SystemConfig c;
  c.bs_antennas = m;
  c.users = k;
  c.ris_elements = n;
  c.general_regime = k != n;
  c.pathloss_ref = 1.0;
  c.pathloss_exp = 0.0;
  c.noise_power = sigma2;
  return c;
}

SolverEntry alternating_entry(const std::string& id, PhaseMethod m, Objective o) {
  SolverEntry e;
  e.id = id;
  e.spec.phase_method = m;
  e.spec.objective = o;
  return e;
}

// Mean over trials of one field, per (sweep value, solver).
std::map<std::pair<double, std::string>, AggregateRecord> by_key(const ExperimentResult& r) {
  std::map<std::pair<double, std::string>, AggregateRecord> out;
  for (const auto& a : r.aggregates) out[{a.sweep_value, a.solver}] = a;
  return out;
}

// f(y | y_t) = y^H M y - 2 Re(y^H (M - A) y_t) + y_t^H (M - A) y_t with
// M = lambda I, on the full N^2-dimensional y.
std::function<double(const Vector<double>&)> explicit_surrogate(const CMatrix<double>& a, double lam,
                                                                const Vector<double>& anchor) {
  const CVector<double> yt = testutil::vec_inverse_phi(anchor);
  const CMatrix<double> gap = lam * CMatrix<double>::Identity(a.rows(), a.cols()) - a;
  const CVector<double> c = gap * yt;
  const double constant = yt.dot(c).real();
  return [lam, c, constant](const Vector<double>& theta) {
    const CVector<double> y = testutil::vec_inverse_phi(theta);
    return lam * y.squaredNorm() - 2 * y.dot(c).real() + constant;
  };
}

Verdict criterion1() {
  std::mt19937_64 rng(1001);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 2;
    const auto ch = testutil::random_channel(rng, 2 * n, n, n);
    const Vector<double> p = testutil::random_powers(rng, n);
    const Vector<double> t = testutil::random_angles(rng, n);
    const double trace = bs_transmit_power(PowerAllocation<double>{p}, ch, PhaseProfile<double>(t));
    const double frob = testutil::frobenius_F(ch, p, t);
    const double quad = PhaseQuadraticForm<double>(ch, p).value_at(t);
    const double kron = testutil::quadratic_F(testutil::explicit_A(ch, p), t);
    for (double v : {frob, quad, kron}) worst = std::max(worst, testutil::rel_err(v, trace));
  }
  return {worst < 1e-8, fmt("max relative disagreement %.2e (limit 1e-8)", worst)};
}

Verdict criterion2() {
  std::mt19937_64 rng(1002);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 3;
    const int k = i % 2 == 0 ? n : n - 1;
    const auto ch = testutil::random_channel(rng, 2 * n, k, n);
    const Vector<double> p = testutil::random_powers(rng, k);
    const Vector<double> t = testutil::random_angles(rng, n);
    const Vector<double> q = PhaseObjective<double>(ch, p).gradient(t);
    const Vector<double> fd = testutil::central_difference(
        [&](const Vector<double>& x) { return testutil::trace_F(ch, p, x); }, t, 1e-5);
    worst = std::max(worst, (q - fd).lpNorm<Eigen::Infinity>() / fd.lpNorm<Eigen::Infinity>());
  }
  return {worst < 1e-5, fmt("max relative gradient error %.2e (limit 1e-5)", worst)};
}

Verdict criterion3() {
  std::mt19937_64 rng(1003);
  double violation = std::numeric_limits<double>::infinity(), tight = 0, slope = 0;
  for (int i = 0; i < 30; ++i) {
    const int n = 2 + i % 3;
    const auto ch = testutil::random_channel(rng, 2 * n, n, n);
    const Vector<double> p = testutil::random_powers(rng, n);
    const PhaseQuadraticForm<double> form(ch, p);
    const CMatrix<double> a = testutil::explicit_A(ch, p);
    const PhaseProfile<double> anchor(testutil::random_angles(rng, n));
    const auto model = build_surrogate(form, anchor);
    for (int s = 0; s < 1000; ++s) {
      const Vector<double> t = testutil::random_angles(rng, n);
      const double gap = surrogate_value(PhaseProfile<double>(t), model) - testutil::quadratic_F(a, t);
      violation = std::min(violation, gap);
    }
    const double f0 = testutil::quadratic_F(a, anchor.theta());
    tight = std::max(tight, std::abs(surrogate_value(anchor, model) - f0) / f0);
    for (int s = 0; s < 5; ++s) {
      Vector<double> dir = testutil::random_angles(rng, n).array() - M_PI;
      dir.normalize();
      const double h = 1e-6;
      auto fs = [&](double mu) { return surrogate_value(PhaseProfile<double>(anchor.theta() + mu * dir), model); };
      auto fo = [&](double mu) { return testutil::quadratic_F(a, anchor.theta() + mu * dir); };
      const double ds = (fs(h) - fs(-h)) / (2 * h);
      const double d_o = (fo(h) - fo(-h)) / (2 * h);
      slope = std::max(slope, std::abs(ds - d_o) / std::max(std::abs(d_o), 1e-3 * model.lambda_max));
    }
  }
  const bool ok = violation >= -1e-10 && tight < 1e-12 && slope < 1e-4;
  return {ok, fmt("min bound gap %.2e (>= -1e-10), anchor gap %.2e, slope mismatch %.2e (< 1e-4)", violation,
                  tight, slope)};
}

Verdict criterion4() {
  std::mt19937_64 rng(1004);
  double worst = 0;
  for (int i = 0; i < 9; ++i) {
    const int n = 1 + i % 3;
    const auto ch = testutil::random_channel(rng, 2 * n, n, n);
    const Vector<double> p = testutil::random_powers(rng, n);
    const CMatrix<double> a = testutil::explicit_A(ch, p);
    const PhaseQuadraticForm<double> form(ch, p);
    const PhaseProfile<double> anchor(testutil::random_angles(rng, n));
    const auto model = build_surrogate(form, anchor);
    const double got = surrogate_value(sfp_update(model).phases, model);
    const auto f = explicit_surrogate(a, model.lambda_max, anchor.theta());
    const int points = n == 3 ? 181 : 721;
    const auto grid = testutil::grid_minimize(f, n, points);
    const Vector<double> polished = testutil::polish_minimum(f, grid.first, 2 * M_PI / (points - 1));
    const double best = std::min(grid.second, f(polished));
    // The closed form must not be beaten by any grid point and must agree
    // with the refined grid minimizer.
    worst = std::max(worst, std::max(got - grid.second, std::abs(got - best)));
  }
  return {worst < 1e-6, fmt("max objective gap to the grid minimum %.2e (limit 1e-6)", worst)};
}

Verdict criterion5() {
  std::mt19937_64 rng(1005);
  const double eps = 1e-3;
  bool increasing = true, small_aux = true;
  double worst_grid = 0;
  int xi_zero_iters = 0;
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int i = 0; i < 40; ++i) {
    const int k = 1 + i % 2;
    const int n = k;
    SystemConfig c = scaled_scenario(2 * n, k, n, 1e-2);
    c.max_tx_power = u(rng);
    c.bs_static_power = u(rng);
    if (i % 4 == 3) c.min_rates = {0.5};
    const auto ch = testutil::random_channel(rng, 2 * n, k, n);
    const auto phases = PhaseProfile<double>(testutil::random_angles(rng, n));
    const PowerFeasibleSet<double> set =
        power_feasible_set(ch, phases, detail::qos_floors<double>(c), c.max_tx_power);
    if (!set.feasible()) continue;
    const auto problem = make_power_problem(set, c);
    const auto r = dinkelbach(problem, eps);
    const auto& h = r.lambda_history;
    for (size_t j = 1; j + 1 < h.size(); ++j) increasing = increasing && h[j] > h[j - 1];
    if (h.size() > 1) increasing = increasing && h.back() >= h[h.size() - 2] * (1 - 1e-12);
    small_aux = small_aux && std::abs(r.auxiliary) < eps;

    // Global check on a grid of the feasible box.
    // Per-user upper end with the other users at their floors.
    const Vector<double> hi =
        ((set.p_max - set.floor_cost()) + (set.c.array() * set.p_min.array())).matrix().cwiseQuotient(set.c);
    double grid = 0;
    if (k == 1) {
      const double x = testutil::golden_max([&](double v) { return problem.ratio(Vector<double>::Constant(1, v)); },
                                            set.p_min(0), hi(0));
      grid = problem.ratio(Vector<double>::Constant(1, x));
    } else {
      const int pts = 1500;
      Vector<double> q(2);
      for (int a = 0; a < pts; ++a) {
        q(0) = set.p_min(0) + (hi(0) - set.p_min(0)) * a / (pts - 1);
        for (int b = 0; b < pts; ++b) {
          q(1) = set.p_min(1) + (hi(1) - set.p_min(1)) * b / (pts - 1);
          if (set.c.dot(q) > set.p_max) break;
          grid = std::max(grid, problem.ratio(q));
        }
      }
    }
    worst_grid = std::max(worst_grid, (grid - problem.ratio(r.p)) / grid);
  }
  {
    SystemConfig c = scaled_scenario(4, 2, 2, 1e-2);
    c.amplifier_inefficiency = 0.0;
    const auto ch = testutil::random_channel(rng, 4, 2, 2);
    const auto set = power_feasible_set(ch, PhaseProfile<double>::constant(2, 0.0), Vector<double>(Vector<double>::Zero(2)),
                                        c.max_tx_power);
    xi_zero_iters = dinkelbach(set, c, eps).iterations;
  }
  const bool ok = increasing && small_aux && worst_grid < 1e-3 && xi_zero_iters == 1;
  return {ok, fmt("lambda increasing %.0f, |aux| < eps %.0f, worst grid shortfall %.2e (< 1e-3), xi=0 iterations %.0f",
                  increasing, small_aux, worst_grid, xi_zero_iters)};
}

Verdict criterion6() {
  std::mt19937_64 rng(1006);
  int violations = 0, unconverged = 0, max_iters = 0, runs = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 3;
    SystemConfig c = scaled_scenario(2 * n, n, n, 1.0 / std::pow(10.0, (i % 4) * 1.0));
    c.max_tx_power = 1.0;
    if (i % 5 == 4) c.min_rates = {0.2 * genie_rate(c)};
    const auto ch = testutil::random_channel(rng, 2 * n, n, n);
    for (auto m : {PhaseMethod::gradient, PhaseMethod::sfp}) {
      SolverSpec s;
      s.phase_method = m;
      const auto out = maximize_ee(ch, c, s);
      ++runs;
      for (size_t j = 1; j < out.history.size(); ++j)
        if (out.history[j] < out.history[j - 1] * (1 - 1e-9)) ++violations;
      if (!out.converged) ++unconverged;
      max_iters = std::max(max_iters, out.outer_iterations);
    }
  }
  const bool ok = violations == 0 && unconverged == 0 && max_iters <= 50;
  return {ok, fmt("%.0f runs: %.0f monotonicity violations, %.0f unconverged, max outer iterations %.0f", runs,
                  violations, unconverged, max_iters)};
}

Verdict criterion7() {
  Verdict v;
  for (int n : {2, 3}) {
    ExperimentPlan plan;
    plan.scenario = scaled_scenario(8, n, n, 1.0);
    plan.scenario.max_tx_power = 1.0;
    plan.sweep = {SweepKind::snr_db, {20.0}};
    plan.trials = 20;
    plan.base_seed = 7000;
    SolverEntry oracle;
    oracle.id = "oracle";
    oracle.kind = SolverKind::oracle;
    oracle.oracle_objective = Objective::sum_rate;
    oracle.oracle_grid.points_per_angle = n == 2 ? 721 : 181;
    oracle.oracle_grid.points_per_power = 41;
    plan.solvers = {alternating_entry("gradient", PhaseMethod::gradient, Objective::sum_rate),
                    alternating_entry("sfp", PhaseMethod::sfp, Objective::sum_rate), oracle};
    const auto res = run_experiment(plan);
    auto agg = by_key(res);
    const double g = agg[{20.0, "gradient"}].se_mean;
    const double s = agg[{20.0, "sfp"}].se_mean;
    const double o = agg[{20.0, "oracle"}].se_mean;
    const bool ok = res.errors == 0 && g >= 0.95 * o && s >= 0.95 * o && s >= 0.98 * g;
    v.pass = v.pass && ok;
    v.detail += fmt("N=K=%.0f: gradient/oracle %.4f, sfp/oracle %.4f, sfp/gradient %.4f; ", n, g / o, s / o, s / g);
  }
  return v;
}

std::vector<double> dbm_range(double lo, double hi, double step) {
  std::vector<double> out;
  for (double d = lo; d <= hi + 1e-9; d += step) out.push_back(dbm_to_watts(d));
  return out;
}

Verdict criterion8() {
  const double sigma2 = 1e-3;
  ExperimentPlan plan;
  plan.scenario = scaled_scenario(8, 4, 4, sigma2);
  plan.sweep = {SweepKind::p_max, dbm_range(0, 36, 4)};
  plan.trials = 100;
  plan.base_seed = 8000;
  plan.solvers = {alternating_entry("gradient", PhaseMethod::gradient, Objective::ee),
                  alternating_entry("sfp", PhaseMethod::sfp, Objective::ee)};
  const auto res = run_experiment(plan);
  auto agg = by_key(res);

  bool se_monotone = true;
  double saturation = 1;
  for (const std::string id : {"gradient", "sfp"}) {
    double prev = 0, best = 0, top = 0;
    for (double p : plan.sweep.values) {
      const auto& a = agg[{p, id}];
      if (a.se_mean < prev * (1 - 1e-9)) se_monotone = false;
      prev = a.se_mean;
      best = std::max(best, a.ee_mean);
      top = a.ee_mean;
    }
    saturation = std::min(saturation, top / best);
  }

  // Relay comparison at the top of the sweep, both systems with N = K = 2.
  ExperimentPlan cmp = plan;
  cmp.scenario = scaled_scenario(8, 2, 2, sigma2);
  cmp.scenario.relay_noise_power = 1.0;  // identity relay noise covariance
  cmp.sweep = {SweepKind::p_max, {plan.sweep.values.back()}};
  SolverEntry relay;
  relay.id = "relay";
  relay.kind = SolverKind::relay;
  cmp.solvers = {alternating_entry("sfp", PhaseMethod::sfp, Objective::ee), relay};
  const auto rc = run_experiment(cmp);
  auto ragg = by_key(rc);
  const double top = cmp.sweep.values.back();
  const double ris_ee = ragg[{top, "sfp"}].ee_mean;
  const double relay_ee = ragg[{top, "relay"}].ee_mean;

  const bool ok = res.errors == 0 && rc.errors == 0 && se_monotone && saturation >= 0.99 && ris_ee > relay_ee;
  return {ok, fmt("SE non-decreasing %.0f; EE(top)/max EE %.5f (>= 0.99); RIS/relay EE at 36 dBm %.3f (> 1)",
                  se_monotone, saturation, ris_ee / relay_ee)};
}

Verdict criterion9() {
  auto run = [](double element_power) {
    ExperimentPlan plan;
    // SNR 0 dB keeps the BS budget active, so extra elements keep paying off.
    plan.scenario = scaled_scenario(4, 1, 4, 1.0);
    plan.scenario.max_tx_power = 1.0;
    plan.scenario.element_power = element_power;
    plan.sweep = {SweepKind::elements, {1, 2, 3, 4}};
    plan.trials = 40;
    plan.base_seed = 9000;
    SolverEntry oracle;
    oracle.id = "oracle";
    oracle.kind = SolverKind::oracle;
    oracle.oracle_grid.points_per_angle = 73;
    oracle.oracle_grid.points_per_power = 41;
    plan.solvers = {oracle};
    const auto res = run_experiment(plan);
    std::vector<double> ee;
    for (const auto& a : res.aggregates) ee.push_back(a.ee_mean);
    return std::make_pair(res.errors, ee);
  };
  const auto [err_hi, hi] = run(0.5);
  const auto [err_lo, lo] = run(1e-9);
  int n_star = 1;
  for (int i = 0; i < 4; ++i)
    if (hi[i] > hi[n_star - 1]) n_star = i + 1;
  bool non_decreasing = true;
  for (int i = 1; i < 4; ++i) non_decreasing = non_decreasing && lo[i] >= lo[i - 1] * (1 - 1e-9);
  const bool ok = err_hi == 0 && err_lo == 0 && n_star > 1 && hi[n_star - 1] > hi[3] && non_decreasing;
  return {ok, fmt("large P_n: N* = %.0f, EE(N*)/EE(4) %.4f; P_n ~ 0: EE(4)/EE(1) %.4f, non-decreasing %.0f", n_star,
                  hi[n_star - 1] / hi[3], lo[3] / lo[0], non_decreasing)};
}

Verdict criterion10() {
  ExperimentPlan plan;
  plan.scenario = scaled_scenario(8, 4, 4, 1.0);
  plan.scenario.max_tx_power = dbw_to_watts(20.0);
  plan.scenario.noise_power = plan.scenario.max_tx_power / 1e3;
  plan.sweep = {SweepKind::qos_fraction, {0.1, 0.2, 0.3, 0.4, 0.5}};
  plan.trials = 200;
  plan.base_seed = 10000;
  plan.solvers = {alternating_entry("sfp", PhaseMethod::sfp, Objective::ee),
                  alternating_entry("gradient", PhaseMethod::gradient, Objective::ee)};
  const auto res = run_experiment(plan);
  auto agg = by_key(res);
  Verdict v;
  v.pass = res.errors == 0;
  for (const std::string id : {"sfp", "gradient"}) {
    double prev = 1.0;
    v.detail += id + ":";
    for (double f : plan.sweep.values) {
      const double rate = agg[{f, id}].feasibility_rate;
      if (rate > prev) v.pass = false;
      prev = rate;
      v.detail += fmt(" %.3f", rate);
    }
    v.detail += "; ";
  }
  return v;
}

Verdict criterion11() {
  ExperimentPlan plan;
  plan.scenario = scaled_scenario(8, 4, 4, 1e-3);
  plan.sweep = {SweepKind::p_max, dbm_range(0, 36, 4)};
  plan.trials = 100;
  plan.base_seed = 11000;
  plan.solvers = {alternating_entry("ee", PhaseMethod::sfp, Objective::ee),
                  alternating_entry("se", PhaseMethod::sfp, Objective::sum_rate)};
  const auto res = run_experiment(plan);
  auto agg = by_key(res);
  const double crossover = dbm_to_watts(16.0);
  double worst_low = 0;
  for (double p : plan.sweep.values) {
    if (p > crossover * (1 + 1e-9)) continue;
    const auto& e = agg[{p, "ee"}];
    const auto& s = agg[{p, "se"}];
    worst_low = std::max({worst_low, std::abs(s.se_mean - e.se_mean) / e.se_mean,
                          std::abs(s.ee_mean - e.ee_mean) / e.ee_mean});
  }
  const double top = plan.sweep.values.back();
  const auto& e = agg[{top, "ee"}];
  const auto& s = agg[{top, "se"}];
  const bool high = s.se_mean >= e.se_mean * (1 - 1e-9) && s.ee_mean <= e.ee_mean * (1 + 1e-9);
  const bool ok = res.errors == 0 && high && worst_low < 0.01;
  return {ok, fmt("at 36 dBm SE ratio %.4f (>= 1), EE ratio %.4f (<= 1); max deviation at <= 16 dBm %.2e (< 1e-2)",
                  s.se_mean / e.se_mean, s.ee_mean / e.ee_mean, worst_low)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "trace identity chain", 10, criterion1},
      {2, "gradient vs finite differences", 30, criterion2},
      {3, "surrogate majorization", 30, criterion3},
      {4, "closed-form surrogate minimizer", 60, criterion4},
      {5, "Dinkelbach convergence and optimality", 60, criterion5},
      {6, "monotone alternating optimization", 600, criterion6},
      {7, "sum rate vs joint grid oracle", 600, criterion7},
      {8, "EE and SE vs transmit power, relay ordering", 900, criterion8},
      {9, "EE vs number of elements", 600, criterion9},
      {10, "feasibility vs QoS fraction", 1800, criterion10},
      {11, "SE-max vs EE-max designs", 900, criterion11},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %d: %s | %s | %.1f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs, c.limit_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
