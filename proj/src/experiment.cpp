#include "ris/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "ris/channel.hpp"

namespace ris {

void ExperimentPlan::validate() const {
  if (trials < 1) throw InvalidArgument("plan: trials must be >= 1");
  if (sweep.values.empty()) throw InvalidArgument("plan: sweep must be non-empty");
  if (solvers.empty()) throw InvalidArgument("plan: at least one solver is required");
  if (workers < 1) throw InvalidArgument("plan: workers must be >= 1");
  for (double v : sweep.values) config_at(*this, v).validate();
}

SystemConfig config_at(const ExperimentPlan& plan, double value) {
  SystemConfig c = plan.scenario;
  switch (plan.sweep.kind) {
    case SweepKind::p_max:
      c.max_tx_power = value;
      break;
    case SweepKind::elements: {
      const int n = static_cast<int>(std::lround(value));
      if (n < 1 || std::abs(value - n) > 1e-9) throw InvalidArgument("sweep: N must be a positive integer");
      c.ris_elements = n;
      c.users = c.general_regime ? std::min(c.users, n) : n;
      break;
    }
    case SweepKind::qos_fraction:
      c.min_rates = {value * genie_rate(c)};
      break;
    case SweepKind::snr_db:
      c.noise_power = c.max_tx_power / db_to_linear(value);
      break;
  }
  return c;
}

ChannelRealization<double> trial_channel(const ExperimentPlan& plan, const SystemConfig& config,
                                         int trial) {
  const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(trial);
  if (plan.sweep.kind != SweepKind::elements) return generate_channels(config, seed);

  SystemConfig widest = config;
  for (double v : plan.sweep.values) {
    const SystemConfig c = config_at(plan, v);
    widest.ris_elements = std::max(widest.ris_elements, c.ris_elements);
    widest.users = std::max(widest.users, c.users);
  }
  const auto full = generate_channels(widest, seed);
  ChannelRealization<double> ch;
  ch.h1 = full.h1.topRows(config.ris_elements);
  ch.h2 = full.h2.topLeftCorner(config.users, config.ris_elements);
  ch.user_positions.assign(full.user_positions.begin(), full.user_positions.begin() + config.users);
  return ch;
}

TrialRecord run_solver(const SolverEntry& solver, const ChannelRealization<double>& ch,
                       const SystemConfig& config, bool record_wall_time) {
  TrialRecord r;
  r.solver = solver.id;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (solver.kind) {
      case SolverKind::alternating: {
        const auto out = maximize(ch, config, solver.spec);
        r.se = out.se;
        r.ee = out.ee;
        r.total_power = out.total_power;
        r.bs_power = out.bs_tx_power;
        r.iterations = out.outer_iterations;
        r.feasible = out.feasible;
        r.qos_relaxed = out.qos_relaxed;
        r.converged = out.converged;
        break;
      }
      case SolverKind::relay: {
        const RelayNoiseModel noise{solver.relay_noise_form, config.relay_noise()};
        const auto out = optimize_relay(ch, config, solver.relay_grid, noise, solver.spec.epsilon,
                                        solver.spec.max_outer_iters);
        r.se = out.se;
        r.ee = out.ee;
        r.total_power = out.total_power;
        r.bs_power = out.bs_tx_power;
        r.iterations = out.outer_iterations;
        r.feasible = out.feasible;
        r.converged = out.converged;
        break;
      }
      case SolverKind::oracle: {
        const auto out = joint_grid_max(ch, config, solver.oracle_objective, solver.oracle_grid);
        r.se = out.se;
        r.ee = out.ee;
        r.total_power = out.total_power;
        r.bs_power = out.bs_tx_power;
        r.iterations = 1;
        r.feasible = out.feasible;
        r.converged = out.converged;
        break;
      }
    }
  } catch (const std::exception& e) {
    r = TrialRecord{};
    r.solver = solver.id;
    r.error = e.what();
  }
  if (record_wall_time)
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, std::ostream* progress) {
  plan.validate();
  const size_t points = plan.sweep.values.size();
  const size_t trials = static_cast<size_t>(plan.trials);
  const size_t solvers = plan.solvers.size();
  const size_t jobs = points * trials;

  ExperimentResult result;
  result.trials.resize(jobs * solvers);
  std::atomic<size_t> next{0};
  std::atomic<size_t> done{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (size_t job = next++; job < jobs; job = next++) {
      const size_t point = job / trials;
      const int trial = static_cast<int>(job % trials);
      const double value = plan.sweep.values[point];
      const SystemConfig config = config_at(plan, value);
      const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(trial);
      std::uint64_t hash = 0;
      std::optional<ChannelRealization<double>> ch;
      std::string channel_error;
      try {
        ch = trial_channel(plan, config, trial);
        hash = channel_hash(*ch);
      } catch (const std::exception& e) {
        channel_error = e.what();
      }
      for (size_t s = 0; s < solvers; ++s) {
        TrialRecord r;
        if (ch) {
          r = run_solver(plan.solvers[s], *ch, config, plan.record_wall_time);
        } else {
          r.solver = plan.solvers[s].id;
          r.error = channel_error;
        }
        r.sweep_value = value;
        r.trial = trial;
        r.seed = seed;
        r.channel_hash = hash;
        result.trials[job * solvers + s] = std::move(r);
      }
      const size_t finished = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(log_mutex);
        *progress << "\r[" << finished << "/" << jobs << "] trials" << std::flush;
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(plan.workers, static_cast<int>(jobs)));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (progress) *progress << "\n";

  for (const auto& r : result.trials)
    if (!r.error.empty()) ++result.errors;
  result.aggregates = aggregate(result.trials);
  return result;
}

std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& trials) {
  // Keep first-appearance order of sweep values and solvers.
  std::vector<std::pair<double, std::string>> keys;
  std::map<std::pair<double, std::string>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : trials) {
    const auto key = std::make_pair(r.sweep_value, r.solver);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
  }

  auto mean_stderr = [](const std::vector<double>& xs) {
    if (xs.empty()) return std::pair{0.0, 0.0};
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    if (xs.size() < 2) return std::pair{mean, 0.0};
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / double(xs.size() - 1) / double(xs.size()))};
  };

  std::vector<AggregateRecord> out;
  for (const auto& key : keys) {
    const auto& rows = groups[key];
    AggregateRecord a;
    a.sweep_value = key.first;
    a.solver = key.second;
    a.trials = static_cast<int>(rows.size());
    std::vector<double> se, ee, total, bs, iters;
    int feasible = 0, relaxed = 0;
    for (const auto* r : rows) {
      if (!r->error.empty()) {
        ++a.errors;
        continue;
      }
      se.push_back(r->se);
      ee.push_back(r->ee);
      total.push_back(r->total_power);
      bs.push_back(r->bs_power);
      iters.push_back(r->iterations);
      if (r->feasible && !r->qos_relaxed) ++feasible;
      if (r->qos_relaxed) ++relaxed;
    }
    std::tie(a.se_mean, a.se_stderr) = mean_stderr(se);
    std::tie(a.ee_mean, a.ee_stderr) = mean_stderr(ee);
    a.total_power_mean = mean_stderr(total).first;
    a.bs_power_mean = mean_stderr(bs).first;
    a.iterations_mean = mean_stderr(iters).first;
    a.feasibility_rate = double(feasible) / double(a.trials);
    a.relaxed_rate = double(relaxed) / double(a.trials);
    out.push_back(a);
  }
  return out;
}

}  // namespace ris
