#pragma once

// Closed-loop simulation environment: holds the global state, applies
// actions through the battery recursion
//   E(t+1) = min([E(t) - ceil(E^com + E^cop)]^+ + A(t), E^max),
// and draws per-device arrivals and fading levels from streams derived
// from one master seed.

#include "flsched/model.hpp"
#include "flsched/stochastics.hpp"

#include <cstdint>
#include <vector>

namespace flsched {

struct StepResult {
  std::vector<int> arrivals;      // harvested quanta this iteration
  std::vector<int> spend_quanta;  // realized ceil(E^com + E^cop)
  std::vector<double> reward;     // batch * upload per device
  std::vector<int> next_battery;  // level carried into the next iteration
  std::vector<uint8_t> outage;    // next battery level == 0
  double total_reward = 0.0;
};

class Environment {
 public:
  // Batteries start empty; the first channel realization is drawn
  // immediately so state() is valid before the first step.
  Environment(const SystemConfig& cfg, uint64_t seed);

  const SystemConfig& config() const { return cfg_; }
  const GlobalState& state() const { return state_; }
  int64_t iteration() const { return iter_; }

  // Applies the action to the current state, credits arrivals, advances
  // to the next iteration and redraws the channel.
  StepResult step(const Action& a);

 private:
  SystemConfig cfg_;
  std::vector<Rng> arrival_rng_;
  std::vector<Rng> channel_rng_;
  std::vector<ArrivalPmf> arrival_pmf_;
  GlobalState state_;
  int64_t iter_ = 0;
};

// Minimal control interface shared by the learned policy and the
// reference baselines. observe() is a no-op for everything except the
// online learner.
class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  virtual Action decide(const GlobalState& state) = 0;
  virtual void observe(const GlobalState& /*prev*/, const Action& /*action*/,
                       const StepResult& /*result*/) {}
  virtual const char* name() const = 0;
};

}  // namespace flsched
