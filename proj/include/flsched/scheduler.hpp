#pragma once

// Per-iteration scheduling: for each device, search the integer
// energy-budget grid, resolve each budget to a (power, batch, upload)
// triple by the closed-form case analysis, score it against the value
// slope, and enforce the global subchannel limit by keeping the top-L
// per-device objectives.

#include "flsched/model.hpp"
#include "flsched/physics.hpp"

#include <vector>

namespace flsched {

// Outcome of the per-device budget search. `level` is the battery level
// the decision was computed for; `budget` is the grid point in quanta.
// A silent decision (upload=false) keeps the budget it was scored at,
// but its physical action consumes nothing.
struct DeviceDecision {
  int level = 0;
  int budget = 0;
  double power_w = 0.0;
  double batch = 0.0;
  bool upload = false;
  double objective = 0.0;  // batch*upload - budget*slope at this budget
};

// Finite-difference derivative of one device's value vector: central
// differences in the interior, one-sided at the ends.
struct ValueSlope {
  std::vector<double> d;  // d[e] for e in {0..E^max}

  double at(int level) const { return d[level]; }
};

ValueSlope value_slope(const std::vector<double>& values);

// Resolves one grid budget to its physical action over gain h:
//   - budget at or below the threshold energy: silent;
//   - budget within (E^th, deltaE^max]: power from the budget inversion,
//     all remaining time and energy spent on training;
//   - budget above deltaE^max: full power, batch capped by deltaE^max.
// The candidate is clipped so its realized consumption never exceeds the
// budget and the iteration duration; a candidate whose transmission alone
// cannot fit the iteration comes back silent.
DeviceDecision decision_for_budget(const SystemConfig& cfg, const DeviceConfig& dev,
                                   double gain, int budget_quanta, double slope = 0.0);

// Best decision for one device: argmax of batch*upload - budget*slope
// over budgets {0..min(battery, ceil(deltaE^max))}, ties to the smaller
// budget. When a unit of training energy is worth less than the slope
// (1/(alpha*C*f^2) <= slope), every budget is dominated and the device
// stays silent at budget 0.
DeviceDecision optimize_device(const SystemConfig& cfg, const DeviceConfig& dev,
                               int battery_level, double gain, double slope);

// Per-device optima for every device in the state.
std::vector<DeviceDecision> schedule_decisions(const SystemConfig& cfg,
                                               const GlobalState& state,
                                               const std::vector<ValueSlope>& slopes);

// Enforces the subchannel limit: if more than L devices would upload,
// keeps the L decisions with the largest objectives (ties to the lower
// device index) and zeroes the rest.
void select_top_l(const SystemConfig& cfg, std::vector<DeviceDecision>& decisions);

Action decisions_to_action(const std::vector<DeviceDecision>& decisions);

// Full per-iteration schedule; the result always passes
// check_action_feasible on the given state.
Action schedule(const SystemConfig& cfg, const GlobalState& state,
                const std::vector<ValueSlope>& slopes);

}  // namespace flsched
