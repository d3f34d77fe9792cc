#include "flsched/learning.hpp"

#include <algorithm>
#include <cmath>

namespace flsched {

std::pair<double, double> default_schedule(int64_t t) {
  const StepSchedule s;
  return {s.eps_v(t), s.eps_gamma(t)};
}

LearnerState make_learner(const SystemConfig& cfg, StepSchedule schedule) {
  LearnerState state;
  state.schedule = schedule;
  state.tables.v.reserve(cfg.devices.size());
  for (const DeviceConfig& dev : cfg.devices) {
    state.tables.v.emplace_back(dev.battery_capacity + 1, 0.0);
    state.outage_limits.push_back(dev.outage_limit);
  }
  state.multipliers.assign(cfg.devices.size(), 0.0);
  return state;
}

double delta_value(const DeviceDecision& decision, double gamma,
                   const std::vector<double>& values, const ArrivalPmf& pmf,
                   int level) {
  const int emax = static_cast<int>(values.size()) - 1;
  double dv = (decision.upload ? decision.batch : 0.0);
  if (level == 0) dv -= gamma;
  if (decision.budget > 0) {
    // Arrival-averaged value change caused by spending the budget. Levels
    // clamp at E^max, so truncating the pmf at any k_max >= E^max leaves
    // this expectation exact.
    const int drained = std::max(decision.level - decision.budget, 0);
    for (int k = 0; k <= pmf.k_max(); ++k) {
      const int post_spend = std::min(drained + k, emax);
      const int post_idle = std::min(decision.level + k, emax);
      dv += pmf.probs[k] * (values[post_spend] - values[post_idle]);
    }
  }
  return dv;
}

void update_value(LearnerState& state, int device, int level, double dv) {
  const double eps = state.schedule.eps_v(state.iter);
  double& v = state.tables.v[device][level];
  v = (1.0 - eps) * v + eps * dv;
}

void update_multiplier(LearnerState& state, int device, bool outage) {
  const double eps = state.schedule.eps_gamma(state.iter);
  double& g = state.multipliers[device];
  g = std::max(g + eps * ((outage ? 1.0 : 0.0) - state.outage_limits[device]), 0.0);
}

ProposedPolicy::ProposedPolicy(const SystemConfig& cfg, StepSchedule schedule,
                               double arrival_tail_tol)
    : cfg_(cfg), state_(make_learner(cfg, schedule)) {
  pmf_.reserve(cfg_.devices.size());
  for (const DeviceConfig& dev : cfg_.devices)
    pmf_.push_back(arrival_pmf(dev, arrival_tail_tol));
}

Action ProposedPolicy::decide(const GlobalState& state) {
  std::vector<ValueSlope> slopes;
  slopes.reserve(cfg_.devices.size());
  for (size_t n = 0; n < cfg_.devices.size(); ++n)
    slopes.push_back(value_slope(state_.tables.v[n]));
  last_decisions_ = schedule_decisions(cfg_, state, slopes);
  select_top_l(cfg_, last_decisions_);
  return decisions_to_action(last_decisions_);
}

void ProposedPolicy::observe(const GlobalState& /*prev*/, const Action& /*action*/,
                             const StepResult& result) {
  double dv_max = 0.0;
  double dgamma_max = 0.0;
  for (size_t n = 0; n < cfg_.devices.size(); ++n) {
    // The entry updated is the level the decision was computed from (the
    // start-of-iteration level), so the reward, the outage penalty and
    // the budgeted post-state all describe the same iteration.
    const int level = last_decisions_[n].level;
    const double target = delta_value(last_decisions_[n], state_.multipliers[n],
                                      state_.tables.v[n], pmf_[n], level);
    const double v_before = state_.tables.v[n][level];
    update_value(state_, static_cast<int>(n), level, target);
    dv_max = std::max(dv_max, std::abs(state_.tables.v[n][level] - v_before));

    const double g_before = state_.multipliers[n];
    update_multiplier(state_, static_cast<int>(n), result.outage[n] != 0);
    dgamma_max = std::max(dgamma_max, std::abs(state_.multipliers[n] - g_before));
  }
  state_.last_delta_v = dv_max;
  state_.last_delta_gamma = dgamma_max;
  advance_iteration(state_);
}

LearnResult learn(const SystemConfig& cfg, Environment& env, const LearnOptions& opts) {
  ProposedPolicy policy(cfg, opts.schedule, opts.arrival_tail_tol);
  LearnResult out;
  out.dv_trace.reserve(opts.max_iters);
  out.dgamma_trace.reserve(opts.max_iters);
  out.reward_trace.reserve(opts.max_iters);
  out.outage_trace.reserve(opts.max_iters);

  for (int64_t t = 0; t < opts.max_iters; ++t) {
    const GlobalState prev = env.state();
    const Action a = policy.decide(prev);
    const StepResult r = env.step(a);
    policy.observe(prev, a, r);

    out.dv_trace.push_back(policy.last_delta_v());
    out.dgamma_trace.push_back(policy.last_delta_gamma());
    out.reward_trace.push_back(r.total_reward);
    out.outage_trace.push_back(
        static_cast<int>(std::count(r.outage.begin(), r.outage.end(), 1)));
    if (opts.snapshot_every > 0 && (t + 1) % opts.snapshot_every == 0)
      out.snapshots.emplace_back(t + 1, policy.learner().tables);

    ++out.iterations;
    if (t + 1 >= opts.min_iters && policy.last_delta_v() < opts.tol_v &&
        policy.last_delta_gamma() < opts.tol_gamma) {
      out.converged = true;
      break;
    }
  }
  out.state = policy.learner();
  return out;
}

}  // namespace flsched
