#pragma once

// Two-timescale online stochastic learning: per-device value tables
// updated at the realized battery level on a fast step-size sequence,
// per-device Lagrange multipliers for the outage constraint updated on a
// slower one, and the closed learning loop that couples both to the
// per-iteration scheduler.

#include "flsched/environment.hpp"
#include "flsched/model.hpp"
#include "flsched/scheduler.hpp"
#include "flsched/stochastics.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace flsched {

// Value of each battery level, one vector per device.
struct ValueTable {
  std::vector<std::vector<double>> v;  // v[device][level]
};

// Step sizes eps(t) = scale / (1+t)^exponent. The defaults satisfy the
// usual stochastic-approximation conditions (divergent sum, summable
// squares) and keep the multiplier strictly on the slower timescale.
struct StepSchedule {
  double v_scale = 1.0;
  double v_exponent = 0.6;
  double gamma_scale = 0.5;
  double gamma_exponent = 0.85;

  double eps_v(int64_t t) const { return v_scale / std::pow(1.0 + t, v_exponent); }
  double eps_gamma(int64_t t) const {
    return gamma_scale / std::pow(1.0 + t, gamma_exponent);
  }
};

// (eps_v, eps_gamma) under the default schedule.
std::pair<double, double> default_schedule(int64_t t);

struct LearnerState {
  ValueTable tables;
  std::vector<double> multipliers;    // gamma_n >= 0
  std::vector<double> outage_limits;  // per-device allowed outage frequency
  int64_t iter = 0;
  StepSchedule schedule;
  double last_delta_v = std::numeric_limits<double>::infinity();
  double last_delta_gamma = std::numeric_limits<double>::infinity();
};

// Zero-initialized tables and multipliers for the configured devices.
LearnerState make_learner(const SystemConfig& cfg, StepSchedule schedule = {});

// Update target for entry `level`: the decision's reward, minus the
// outage penalty when that level is empty, plus the arrival-averaged
// difference between the post-budget and post-idle value of the level
// the decision was taken from.
double delta_value(const DeviceDecision& decision, double gamma,
                   const std::vector<double>& values, const ArrivalPmf& pmf, int level);

// V(l) <- (1 - eps_v) V(l) + eps_v * dv at entry l only.
void update_value(LearnerState& state, int device, int level, double dv);

// gamma <- [gamma + eps_gamma * (outage - limit)]^+.
void update_multiplier(LearnerState& state, int device, bool outage);

inline void advance_iteration(LearnerState& state) { ++state.iter; }

// Scheduler driven by the learner's value slopes; observe() applies the
// value and multiplier updates after every environment step.
class ProposedPolicy : public SchedulingPolicy {
 public:
  explicit ProposedPolicy(const SystemConfig& cfg, StepSchedule schedule = {},
                          double arrival_tail_tol = 1e-12);

  Action decide(const GlobalState& state) override;
  void observe(const GlobalState& prev, const Action& action,
               const StepResult& result) override;
  const char* name() const override { return "proposed"; }

  const LearnerState& learner() const { return state_; }
  double last_delta_v() const { return state_.last_delta_v; }
  double last_delta_gamma() const { return state_.last_delta_gamma; }

 private:
  SystemConfig cfg_;
  LearnerState state_;
  std::vector<ArrivalPmf> pmf_;
  std::vector<DeviceDecision> last_decisions_;
};

struct LearnOptions {
  int64_t max_iters = 5000;
  double tol_v = 1e-3;      // stop once ||V(t+1)-V(t)||_inf drops below
  double tol_gamma = 1e-3;  // ... and ||gamma(t+1)-gamma(t)||_inf too
  int64_t min_iters = 100;  // tolerance checks only apply from here on; a
                            // freshly started system with empty batteries
                            // moves nothing and would stop at t=0
  StepSchedule schedule{};
  double arrival_tail_tol = 1e-12;
  int64_t snapshot_every = 0;  // value-table snapshot cadence, 0 = off
};

struct LearnResult {
  LearnerState state;
  bool converged = false;
  int64_t iterations = 0;
  std::vector<double> dv_trace;      // per-iteration ||V(t+1)-V(t)||_inf
  std::vector<double> dgamma_trace;  // per-iteration ||gamma change||_inf
  std::vector<double> reward_trace;  // per-iteration total reward
  std::vector<int> outage_trace;     // per-iteration count of empty batteries
  std::vector<std::pair<int64_t, ValueTable>> snapshots;
};

// Runs the closed loop on the environment until both tolerances are met
// or max_iters is exhausted (returned with converged = false).
LearnResult learn(const SystemConfig& cfg, Environment& env, const LearnOptions& opts);

}  // namespace flsched
