#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ris/phase_gradient.hpp"
#include "test_util.hpp"

using namespace ris;
using testutil::Cd;

namespace {

std::function<double(const Vector<double>&)> trace_objective(const ChannelRealization<double>& ch,
                                                             const Vector<double>& p) {
  return [&ch, p](const Vector<double>& t) { return testutil::trace_F(ch, p, t); };
}

}  // namespace

TEST_CASE("objective: identity channels give the power sum") {
  ChannelRealization<double> ch;
  ch.h1 = CMatrix<double>::Identity(3, 3);
  ch.h2 = CMatrix<double>::Identity(3, 3);
  const Vector<double> p = (Vector<double>(3) << 0.2, 0.3, 0.5).finished();
  const PowerAllocation<double> pa{p};
  CHECK(phase_objective(PhaseProfile<double>::constant(3, 0.0), pa, ch) == doctest::Approx(1.0));
}

TEST_CASE("objective: trace, Frobenius and quadratic forms agree") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 2;
    const auto ch = testutil::random_channel(rng, 2 * n, n, n);
    const Vector<double> p = testutil::random_powers(rng, n);
    const Vector<double> t = testutil::random_angles(rng, n);
    const double direct = testutil::trace_F(ch, p, t);
    const double frob = testutil::frobenius_F(ch, p, t);
    const double quad = testutil::quadratic_F(testutil::explicit_A(ch, p), t);
    const PhaseObjective<double> obj(ch, p);
    CHECK(testutil::rel_err(frob, direct) < 1e-8);
    CHECK(testutil::rel_err(quad, direct) < 1e-8);
    CHECK(testutil::rel_err(obj.value(t), direct) < 1e-8);
    CHECK(testutil::rel_err(obj.direct_value(t), direct) < 1e-8);
  }
}

TEST_CASE("objective is linear in the powers") {
  std::mt19937_64 rng(22);
  const auto ch = testutil::random_channel(rng, 4, 2, 2);
  const Vector<double> p = testutil::random_powers(rng, 2);
  const Vector<double> t = testutil::random_angles(rng, 2);
  const double f1 = PhaseObjective<double>(ch, p).value(t);
  const double f4 = PhaseObjective<double>(ch, Vector<double>(4 * p)).value(t);
  CHECK(testutil::rel_err(f4, 4 * f1) < 1e-12);
}

TEST_CASE("reduced matrix equals the diagonal slots of the explicit Kronecker A") {
  CHECK(diagonal_slot(0, 5) == 0);
  CHECK(diagonal_slot(1, 5) == 6);
  CHECK(diagonal_slot(2, 5) == 12);
  CHECK(diagonal_slot(3, 5) == 18);
  CHECK(diagonal_slot(4, 5) == 24);

  std::mt19937_64 rng(23);
  for (int n = 1; n <= 3; ++n) {
    const auto ch = testutil::random_channel(rng, n + 2, n, n);
    const Vector<double> p = testutil::random_powers(rng, n);
    const CMatrix<double> a = testutil::explicit_A(ch, p);
    const PhaseQuadraticForm<double> form(ch, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(form.reduced()(i, j) - a(diagonal_slot(i, n), diagonal_slot(j, n))) <
              1e-10 * a.norm());
  }
}

TEST_CASE("quadratic form rejects K != N") {
  std::mt19937_64 rng(24);
  const auto ch = testutil::random_channel(rng, 6, 2, 3);
  CHECK_THROWS_AS(PhaseQuadraticForm<double>(ch, Vector<double>::Ones(2)), InvalidArgument);
  // The objective falls back to the trace form.
  const PhaseObjective<double> obj(ch, Vector<double>::Ones(2));
  CHECK_FALSE(obj.quadratic_form().has_value());
  const Vector<double> t = testutil::random_angles(rng, 3);
  CHECK(testutil::rel_err(obj.value(t), testutil::trace_F(ch, Vector<double>::Ones(2), t)) < 1e-10);
}

TEST_CASE("gradient: N = 1 is identically zero") {
  std::mt19937_64 rng(25);
  const auto ch = testutil::random_channel(rng, 2, 1, 1);
  const PhaseObjective<double> obj(ch, Vector<double>::Ones(1));
  for (double t : {0.0, 1.0, 4.0}) CHECK(std::abs(obj.gradient(Vector<double>::Constant(1, t))(0)) < 1e-14);
}

TEST_CASE("gradient matches central differences (quadratic and trace paths)") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 3;
    const int k = trial % 4 == 3 ? n - 1 : n;  // some general-regime states
    const auto ch = testutil::random_channel(rng, 2 * n, k, n);
    const Vector<double> p = testutil::random_powers(rng, k);
    const Vector<double> t = testutil::random_angles(rng, n);
    const PhaseObjective<double> obj(ch, p);
    const Vector<double> fd = testutil::central_difference(trace_objective(ch, p), t);
    const Vector<double> q = obj.gradient(t);
    CHECK((q - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff() < 1e-5);
    if (k == n) {
      const Vector<double> qd = obj.direct_gradient(t);
      CHECK((q - qd).norm() < 1e-8 * (1 + q.norm()));
    }
    // Common-phase invariance.
    CHECK(std::abs(q.sum()) < 1e-8 * (1 + q.cwiseAbs().sum()));
  }
}

TEST_CASE("gradient vanishes at a grid-found minimizer") {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ch = testutil::random_channel(rng, 4, 2, 2);
    const Vector<double> p = testutil::random_powers(rng, 2);
    const auto f = testutil::frobenius_objective(ch, p);
    const auto [grid_theta, grid_min] = testutil::grid_minimize(f, 2, 721);
    const Vector<double> theta = testutil::polish_minimum(f, grid_theta, 2 * M_PI / 720);
    CHECK(f(theta) <= grid_min);
    const Vector<double> q = PhaseObjective<double>(ch, p).gradient(theta);
    CHECK(q.norm() < 1e-4 * std::max(1.0, grid_min));
  }
}

TEST_CASE("step size") {
  std::mt19937_64 rng(28);
  const auto ch = testutil::random_channel(rng, 6, 3, 3);
  const Vector<double> p = testutil::random_powers(rng, 3);
  const PhaseObjective<double> obj(ch, p);
  const Vector<double> t = testutil::random_angles(rng, 3);
  const double f0 = obj.value(t);

  SUBCASE("zero direction stalls") {
    const auto s = step_size(obj, t, Vector<double>(Vector<double>::Zero(3)), f0);
    CHECK(s.stalled);
    CHECK(s.mu == 0.0);
  }
  SUBCASE("model minimizer") {
    QuadraticStepModel<double> m{1.0, 2.0, 4.0};
    REQUIRE(m.minimizer());
    CHECK(*m.minimizer() == doctest::Approx(0.25));
    CHECK_FALSE(QuadraticStepModel<double>{1.0, -1.0, 1.0}.minimizer());
    CHECK_FALSE(QuadraticStepModel<double>{1.0, 1.0, -1.0}.minimizer());
  }
  SUBCASE("model coefficients are the Taylor coefficients of h") {
    const Vector<double> d = -obj.gradient(t);
    const auto model = quadratic_step_model(*obj.quadratic_form(), t, d);
    auto h = [&](double mu) { return obj.value(t + mu * d); };
    const double e = 1e-4;
    CHECK(testutil::rel_err(model.z0, f0) < 1e-12);
    CHECK(std::abs(-(h(e) - h(-e)) / (2 * e) - model.z1) < 1e-6 * (1 + std::abs(model.z1)));
    CHECK(std::abs((h(e) - 2 * f0 + h(-e)) / (2 * e * e) - model.z2) < 1e-4 * (1 + std::abs(model.z2)));
  }
  SUBCASE("returned step decreases h on random states") {
    for (int trial = 0; trial < 50; ++trial) {
      const Vector<double> th = testutil::random_angles(rng, 3);
      const double v0 = obj.value(th);
      const Vector<double> q = obj.gradient(th);
      const auto s = step_size(obj, th, Vector<double>(-q), v0);
      CHECK(obj.value(th - s.mu * q) <= v0);
      if (!s.stalled) CHECK(s.value < v0);
    }
  }
}

TEST_CASE("PRP direction") {
  const Vector<double> q = (Vector<double>(3) << 1.0, -2.0, 0.5).finished();
  const Vector<double> d_old = (Vector<double>(3) << 0.3, 0.1, -0.7).finished();

  auto same = prp_direction(q, q, d_old);
  CHECK(same.beta == 0.0);
  CHECK((same.d + q).norm() == 0.0);

  // beta = (q_new - q_old).q_new / |q_old|^2 = 99; d_old aligned with q_new
  // makes the PRP direction ascend.
  const Vector<double> q_new = (Vector<double>(2) << 1.0, 0.0).finished();
  const Vector<double> q_old = (Vector<double>(2) << -1.0, 0.1).finished();
  const Vector<double> bad = (Vector<double>(2) << 1.0, 0.0).finished();
  auto safe = prp_direction(q_new, q_old, bad);
  CHECK(safe.restarted);
  CHECK((safe.d + q_new).norm() == 0.0);

  auto zero = prp_direction(q, Vector<double>(Vector<double>::Zero(3)), d_old);
  CHECK(zero.zero_gradient);
  CHECK(zero.d.norm() == 0.0);

  std::mt19937_64 rng(29);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 1000; ++trial) {
    Vector<double> a(4), b(4), c(4);
    for (int i = 0; i < 4; ++i) {
      a(i) = g(rng);
      b(i) = g(rng);
      c(i) = g(rng);
    }
    CHECK(a.dot(prp_direction(a, b, c).d) < 0.0);
  }
}

TEST_CASE("optimize_phases_gradient: N = 1 keeps the start") {
  std::mt19937_64 rng(30);
  const auto ch = testutil::random_channel(rng, 2, 1, 1);
  const auto start = PhaseProfile<double>::constant(1, 1.0);
  const auto r = optimize_phases_gradient(start, PowerAllocation<double>{Vector<double>::Ones(1)}, ch, 1e-6);
  CHECK(r.phases.theta()(0) == doctest::Approx(1.0));
  CHECK(r.iterations <= 1);
}

TEST_CASE("optimize_phases_gradient: monotone and near the grid minimum") {
  std::mt19937_64 rng(31);
  int within = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    const auto ch = testutil::random_channel(rng, 4, 2, 2);
    const Vector<double> p = testutil::random_powers(rng, 2);
    const auto r = optimize_phases_gradient(PhaseProfile<double>::constant(2, M_PI / 2),
                                            PowerAllocation<double>{p}, ch, 1e-6);
    for (size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-12);
    CHECK(testutil::rel_err(r.objective, testutil::trace_F(ch, p, r.phases.theta())) < 1e-8);
    const double grid_min = testutil::grid_minimize(testutil::frobenius_objective(ch, p), 2, 721).second;
    if (r.objective <= grid_min * 1.02) ++within;
  }
  CHECK(within == trials);
}

TEST_CASE("optimize_phases_gradient: a minimizer is a fixed point") {
  std::mt19937_64 rng(32);
  const auto ch = testutil::random_channel(rng, 4, 2, 2);
  const Vector<double> p = testutil::random_powers(rng, 2);
  const auto f = testutil::frobenius_objective(ch, p);
  const Vector<double> grid_theta = testutil::grid_minimize(f, 2, 721).first;
  const Vector<double> star = testutil::polish_minimum(f, grid_theta, 2 * M_PI / 720);
  const auto r = optimize_phases_gradient(PhaseProfile<double>(star), PowerAllocation<double>{p}, ch, 1e-6);
  CHECK(r.iterations <= 2);
  CHECK(phase_change(r.phases.theta(), star) < 1e-6);
}
