// Acceptance suite: runs every top-level requirement end to end and
// prints one pass/fail line per criterion. Exit status is the number of
// failed criteria.

#include "flsched/baselines.hpp"
#include "flsched/config_io.hpp"
#include "flsched/harness.hpp"
#include "flsched/learning.hpp"
#include "flsched/model.hpp"
#include "flsched/physics.hpp"
#include "flsched/scheduler.hpp"
#include "flsched/stochastics.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace flsched;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, const std::string& detail) {
    if (!cond) {
      ok = false;
      notes.push_back(detail);
    }
  }
  void note(const std::string& detail) { notes.push_back(detail); }
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

SystemConfig reference_config() {
  SystemConfig cfg = default_config();
  cfg.devices.assign(1, DeviceConfig{});
  cfg.devices[0].max_power_w = 0.4;
  cfg.num_subchannels = 1;
  cfg.noise_power_w = 1e-13;
  cfg.channel_levels = {{7.5e-13, 1.0}};
  return cfg;
}

const std::vector<PolicyKind> kAllPolicies = {PolicyKind::Proposed, PolicyKind::CsiBased,
                                              PolicyKind::Myopic, PolicyKind::Random};
const std::vector<uint64_t> kSeeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

// --- criterion 1: closed-form formula fidelity -----------------------------

Check criterion1_formulas() {
  Check c;
  const SystemConfig cfg = reference_config();
  const DeviceConfig& dev = cfg.devices[0];
  const double rel = 1e-9;

  const ComputeBudget cb = compute_budget(dev, cfg.capacitance, 1.0);
  c.expect(std::abs(cb.cop_time_s - 5.0) <= rel * 5.0, "compute time != 5 s");
  c.expect(std::abs(cb.cop_energy_j - 4.0) <= rel * 4.0, "compute energy != 4 J");
  const ComputeBudget half = compute_budget(dev, cfg.capacitance, 0.5);
  c.expect(std::abs(half.cop_time_s - 2.5) <= rel * 2.5, "half batch time != 2.5 s");
  c.expect(std::abs(half.cop_energy_j - 2.0) <= rel * 2.0, "half batch energy != 2 J");

  const LinkBudget lb = link_budget(cfg, dev, 7.5e-13, 0.4, true);
  c.expect(std::abs(lb.rate_bps - 2e5) <= rel * 2e5, "rate != 2e5 bit/s");
  c.expect(std::abs(lb.tx_time_s - 5.0) <= rel * 5.0, "tx time != 5 s");
  c.expect(std::abs(lb.tx_energy_j - 2.0) <= rel * 2.0, "tx energy != 2 J");

  const double eth = threshold_energy(cfg, 7.5e-13);
  const double eth_expected = 10.0 * 1e-13 / 7.5e-13;
  c.expect(std::abs(eth - eth_expected) <= rel * eth_expected, "threshold energy off");

  const double emax = max_energy_budget(cfg, dev, 7.5e-13);
  c.expect(std::abs(emax - 6.0) <= rel * 6.0, "spend cap != 6 J");

  int bad = 0;
  const double x0 = -std::exp(-1.0);
  const int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double x = x0 + 1e-9 * std::pow(1e15, static_cast<double>(i) / n);
    const double w = lambert_w0(x);
    if (std::abs(w * std::exp(w) - x) / std::max(std::abs(x), 1.0) >= 1e-12) ++bad;
  }
  c.expect(bad == 0, "Lambert residual >= 1e-12 at " + std::to_string(bad) + " points");
  return c;
}

// --- criterion 2: budget/power inversion ------------------------------------

Check criterion2_inversion() {
  Check c;
  Rng rng(424242);
  int cases = 0;
  double worst_solver = 0.0;
  double worst_roundtrip = 0.0;
  while (cases < 10'000) {
    SystemConfig cfg = reference_config();
    DeviceConfig& dev = cfg.devices[0];
    dev.cycles_per_unit = 1e10 * (1.0 + 0.9 * rng.next_double());
    dev.cpu_freq_hz = 1e9 * (1.0 + 3.0 * rng.next_double());
    dev.max_power_w = 0.1 + rng.next_double() * 0.9;
    const double gain = 2e-13 * std::pow(40.0, rng.next_double());
    const double eth = threshold_energy(cfg, gain);
    const double emax = max_energy_budget(cfg, dev, gain);
    if (emax <= eth * 1.001) continue;
    ++cases;
    const double budget = eth + (1e-4 + (1 - 1e-4) * rng.next_double()) * (emax - eth);
    const double p = power_from_budget(cfg, dev, gain, budget);
    const double oracle = testutil::oracle_power_for_budget(cfg, dev, gain, budget);
    worst_solver = std::max(worst_solver, std::abs(p - oracle) / oracle);
    const double back = budget_from_power(cfg, dev, gain, p);
    worst_roundtrip = std::max(worst_roundtrip, std::abs(back - budget) / budget);
  }
  c.note("worst solver disagreement " + fmt(worst_solver) + ", worst round-trip " +
         fmt(worst_roundtrip) + " over 10000 draws");
  c.expect(worst_solver < 1e-6, "solver vs bisection oracle exceeded 1e-6");
  c.expect(worst_roundtrip < 1e-6, "budget round-trip exceeded 1e-6");
  return c;
}

// --- criterion 3: per-device optimizer equals exhaustive search -------------

Check criterion3_optimizer_oracle() {
  Check c;
  Rng rng(31337);
  double worst = 0.0;
  for (int draw = 0; draw < 200; ++draw) {
    SystemConfig cfg = reference_config();
    DeviceConfig& dev = cfg.devices[0];
    dev.battery_capacity = 1 + rng.next_below(4);  // E^max <= 4
    dev.cycles_per_unit = 1e10 * (1.0 + 0.9 * rng.next_double());
    dev.cpu_freq_hz = 2e9 * (1.0 + rng.next_double());
    dev.max_power_w = 0.2 + rng.next_double() * 0.8;
    const double gain = 2e-13 * std::pow(30.0, rng.next_double());
    const double slope = -0.1 + 0.5 * rng.next_double();
    const int battery = rng.next_below(dev.battery_capacity + 1);

    const DeviceDecision dec = optimize_device(cfg, dev, battery, gain, slope);
    const double oracle =
        testutil::oracle_best_objective(cfg, dev, gain, battery, slope, 10'000);
    const double err = std::abs(dec.objective - oracle) / std::max(1.0, std::abs(oracle));
    worst = std::max(worst, err);
  }
  c.note("worst relative objective gap " + fmt(worst) + " over 200 draws");
  c.expect(worst < 1e-4, "scheduler objective deviates from exhaustive search");
  return c;
}

// --- criterion 4: constraint satisfaction everywhere ------------------------

Check criterion4_constraints() {
  Check c;
  const SystemConfig cfg = default_config();

  std::vector<std::unique_ptr<SchedulingPolicy>> policies;
  for (const PolicyKind kind : kAllPolicies)
    policies.push_back(make_policy(kind, cfg, 17));

  // Train the learned policy in place first so the random states below
  // meet nontrivial value slopes, not the zero-initialized tables.
  {
    Environment env(cfg, 5);
    SchedulingPolicy& proposed = *policies.front();
    for (int t = 0; t < 1000; ++t) {
      const GlobalState prev = env.state();
      const Action a = proposed.decide(prev);
      proposed.observe(prev, a, env.step(a));
    }
  }

  Rng rng(90210);
  int violations = 0;
  for (int i = 0; i < 10'000; ++i) {
    const GlobalState s = testutil::random_state(cfg, rng);
    for (auto& policy : policies) {
      const Action a = policy->decide(s);
      if (!check_action_feasible(cfg, s, a).ok()) ++violations;
    }
  }
  c.note("0 violations allowed, observed " + std::to_string(violations) +
         " over 10000 states x 4 policies");
  c.expect(violations == 0, "feasibility violation on a random state");

  // Full closed-loop episodes: batteries must stay within range.
  for (const PolicyKind kind : kAllPolicies) {
    Environment env(cfg, 31);
    auto policy = make_policy(kind, cfg, 31);
    bool in_range = true;
    bool feasible = true;
    for (int t = 0; t < 2000; ++t) {
      const GlobalState prev = env.state();
      for (int n = 0; n < cfg.num_devices(); ++n)
        in_range = in_range && prev.battery[n] >= 0 &&
                   prev.battery[n] <= cfg.devices[n].battery_capacity;
      const Action a = policy->decide(prev);
      feasible = feasible && check_action_feasible(cfg, prev, a).ok();
      const StepResult r = env.step(a);
      policy->observe(prev, a, r);
    }
    c.expect(in_range, std::string(policy_name(kind)) + ": battery left [0, E^max]");
    c.expect(feasible, std::string(policy_name(kind)) + ": infeasible action in episode");
  }
  return c;
}

// --- criterion 5: learning transient dies down ------------------------------

Check criterion5_convergence() {
  Check c;
  const SystemConfig cfg = default_config();
  std::vector<double> ratios;
  for (const uint64_t seed : kSeeds) {
    const auto rows = convergence_trace(cfg, LearnOptions{}, seed, 2000);
    const double early = rows[10].dv_inf;
    const double late = rows[1500].dv_inf;
    ratios.push_back(early > 0.0 ? late / early : 1.0);
  }
  const double med = median(ratios);
  c.note("median ||dV|| ratio t=1500 vs t=10: " + fmt(med) + " (limit 0.05)");
  c.expect(med < 0.05, "value updates at t=1500 not below 5% of t=10");
  return c;
}

// --- criterion 6: outage constraint after burn-in ---------------------------

Check criterion6_outage() {
  Check c;
  const SystemConfig cfg = default_config();
  std::vector<std::vector<double>> per_device(cfg.num_devices());
  for (const uint64_t seed : kSeeds) {
    const EpisodeResult ep =
        run_episode(cfg, LearnOptions{}, PolicyKind::Proposed, seed, 5000, 1000);
    for (int n = 0; n < cfg.num_devices(); ++n)
      per_device[n].push_back(ep.metrics.outage_freq[n]);
  }
  double worst = 0.0;
  for (int n = 0; n < cfg.num_devices(); ++n) worst = std::max(worst, median(per_device[n]));
  c.note("worst per-device median outage " + fmt(worst) + " (limit 0.04 + 0.01)");
  c.expect(worst <= 0.05, "outage frequency above the constraint plus slack");
  return c;
}

// --- criterion 7: dominance over the reference policies ---------------------

Check criterion7_dominance() {
  Check c;
  ExperimentSpec spec = default_spec();
  spec.sweep_var = SweepVar::ArrivalRate;
  spec.sweep_values = {1, 2, 3, 4, 5};
  spec.policies = kAllPolicies;
  spec.seeds = kSeeds;
  spec.horizon = 5000;
  spec.burn_in = 1000;
  const std::vector<MetricsRecord> records = run_sweep(spec);

  for (const double lambda : spec.sweep_values) {
    std::vector<double> prop;
    double best_baseline = -1.0;
    const char* best_name = "";
    for (const PolicyKind kind : kAllPolicies) {
      std::vector<double> utilities;
      for (const MetricsRecord& m : records)
        if (m.policy == kind && m.sweep_value == lambda)
          utilities.push_back(m.avg_utility);
      const double avg = mean(utilities);
      if (kind == PolicyKind::Proposed) {
        prop = utilities;
      } else if (avg > best_baseline) {
        best_baseline = avg;
        best_name = policy_name(kind);
      }
    }
    const double diff = mean(prop) - best_baseline;
    c.note("lambda=" + fmt(lambda) + ": proposed-" + best_name + " = " + fmt(diff));
    c.expect(diff >= 0.0, "proposed below best baseline at lambda=" + fmt(lambda));
  }
  return c;
}

// --- criterion 8: qualitative trends ----------------------------------------

int trend_violations(const std::vector<double>& means, bool non_decreasing) {
  int violations = 0;
  for (size_t i = 0; i + 1 < means.size(); ++i) {
    const bool bad =
        non_decreasing ? means[i + 1] < means[i] - 1e-12 : means[i + 1] > means[i] + 1e-12;
    violations += bad ? 1 : 0;
  }
  return violations;
}

std::vector<double> proposed_curve(SweepVar var, const std::vector<double>& values) {
  ExperimentSpec spec = default_spec();
  spec.sweep_var = var;
  spec.sweep_values = values;
  spec.policies = {PolicyKind::Proposed};
  spec.seeds = kSeeds;
  spec.horizon = 5000;
  spec.burn_in = 1000;
  const auto records = run_sweep(spec);
  std::vector<double> means;
  for (const double v : values) {
    std::vector<double> utilities;
    for (const MetricsRecord& m : records)
      if (m.sweep_value == v) utilities.push_back(m.avg_utility);
    means.push_back(mean(utilities));
  }
  return means;
}

Check criterion8_trends() {
  Check c;
  const auto battery = proposed_curve(SweepVar::BatteryCapacity, {2, 3, 4, 5, 6, 7, 8});
  int v = trend_violations(battery, /*non_decreasing=*/true);
  c.note("battery capacity curve: " + fmt(battery.front()) + " .. " + fmt(battery.back()) +
         ", adjacent violations " + std::to_string(v));
  c.expect(v <= 1, "utility not non-decreasing in battery capacity");

  const auto cycles = proposed_curve(
      SweepVar::CyclesPerUnit, {1.0e10, 1.15e10, 1.3e10, 1.45e10, 1.6e10, 1.75e10, 1.9e10});
  v = trend_violations(cycles, /*non_decreasing=*/false);
  c.note("cpu cycle cost curve: " + fmt(cycles.front()) + " .. " + fmt(cycles.back()) +
         ", adjacent violations " + std::to_string(v));
  c.expect(v <= 1, "utility not non-increasing in cycles per unit");

  const auto freq =
      proposed_curve(SweepVar::CpuFreq, {2.0e9, 2.4e9, 2.8e9, 3.2e9, 3.6e9, 4.0e9});
  v = trend_violations(freq, /*non_decreasing=*/false);
  c.note("cpu frequency curve: " + fmt(freq.front()) + " .. " + fmt(freq.back()) +
         ", adjacent violations " + std::to_string(v));
  c.expect(v <= 1, "utility not non-increasing in cpu frequency");
  return c;
}

// --- criterion 9: structure of the trained policy surface -------------------

Check criterion9_surface() {
  Check c;
  const SystemConfig cfg = default_config();
  Environment env(cfg, 1);
  LearnOptions opts;
  opts.max_iters = 5000;
  opts.tol_v = 0.0;
  opts.tol_gamma = 0.0;
  const LearnResult trained = learn(cfg, env, opts);
  const auto rows = dump_policy_surface(cfg, trained.state, 0);

  bool worst_silent = true;
  for (const SurfaceRow& row : rows)
    if (row.channel_level == 0 && row.power_w != 0.0) worst_silent = false;
  c.expect(worst_silent, "worst fading level transmits");

  for (size_t level = 0; level < cfg.channel_levels.size(); ++level) {
    double prev = 0.0;
    bool monotone = true;
    for (const SurfaceRow& row : rows) {
      if (row.channel_level != static_cast<int>(level)) continue;
      if (row.power_w < prev - 1e-12) monotone = false;
      prev = row.power_w;
    }
    c.expect(monotone,
             "power not non-decreasing in battery at level " + std::to_string(level));
  }
  return c;
}

// --- criterion 10: byte-identical reruns ------------------------------------

Check criterion10_determinism() {
  Check c;
  const SystemConfig cfg = default_config();
  const LearnOptions learn_opts{};

  auto render_episode = [&](PolicyKind kind) {
    const EpisodeResult ep = run_episode(cfg, learn_opts, kind, 42, 1500, 300, -1, 1);
    std::ostringstream os;
    write_trace_csv(os, ep.trace);
    write_metrics_csv(os, {ep.metrics});
    return os.str();
  };
  for (const PolicyKind kind : kAllPolicies)
    c.expect(render_episode(kind) == render_episode(kind),
             std::string("episode rerun differs for ") + policy_name(kind));

  ExperimentSpec spec = default_spec();
  spec.sweep_values = {2, 3};
  spec.policies = {PolicyKind::Proposed, PolicyKind::Myopic};
  spec.seeds = {1, 2};
  spec.horizon = 800;
  spec.burn_in = 200;
  auto render_sweep = [&] {
    std::ostringstream os;
    write_metrics_csv(os, run_sweep(spec));
    write_summary_csv(os, run_sweep(spec));
    write_manifest(os, "sweep", spec);
    return os.str();
  };
  c.expect(render_sweep() == render_sweep(), "sweep rerun differs");
  return c;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Check()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  const std::vector<Criterion> criteria = {
      {1, "formula fidelity (times, energies, threshold, cap, Lambert W)",
       criterion1_formulas},
      {2, "power/budget inversion vs bisection oracle and round-trip",
       criterion2_inversion},
      {3, "per-device optimizer matches exhaustive search", criterion3_optimizer_oracle},
      {4, "constraint satisfaction across policies and episodes", criterion4_constraints},
      {5, "value updates shrink below 5% of their early size by t=1500",
       criterion5_convergence},
      {6, "post-burn-in outage within the constraint plus slack", criterion6_outage},
      {7, "learned policy dominates the reference policies over the arrival sweep",
       criterion7_dominance},
      {8, "utility trends in battery capacity, cycle cost and cpu frequency",
       criterion8_trends},
      {9, "trained policy surface: silent worst level, power monotone in battery",
       criterion9_surface},
      {10, "identical seeds give byte-identical outputs", criterion10_determinism},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    const Check result = criterion.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d. %s (%.1fs)\n", result.ok ? "PASS" : "FAIL", criterion.id,
                criterion.title, secs);
    for (const std::string& note : result.notes) std::printf("        %s\n", note.c_str());
    failures += result.ok ? 0 : 1;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
