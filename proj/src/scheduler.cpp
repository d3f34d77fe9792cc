#include "flsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flsched {

ValueSlope value_slope(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw std::invalid_argument("value_slope: need at least 2 levels");
  ValueSlope s;
  s.d.resize(n);
  s.d[0] = values[1] - values[0];
  s.d[n - 1] = values[n - 1] - values[n - 2];
  for (int e = 1; e + 1 < n; ++e) s.d[e] = (values[e + 1] - values[e - 1]) / 2.0;
  return s;
}

DeviceDecision decision_for_budget(const SystemConfig& cfg, const DeviceConfig& dev,
                                   double gain, int budget_quanta, double slope) {
  DeviceDecision dec;
  dec.budget = budget_quanta;
  dec.objective = -budget_quanta * slope;  // silent value; overwritten on upload
  if (budget_quanta <= 0) return dec;

  const double budget_j = budget_quanta * cfg.energy_quantum_j;
  if (budget_j <= threshold_energy(cfg, gain)) return dec;
  const double emax_j = max_energy_budget(cfg, dev, gain);
  if (emax_j <= 0.0) return dec;

  double power;
  double spend_cap_j;  // energy actually spendable at this budget
  if (budget_j <= emax_j) {
    power = power_from_budget(cfg, dev, gain, budget_j);
    spend_cap_j = budget_j;
  } else {
    power = dev.max_power_w;
    spend_cap_j = emax_j;
  }

  const LinkBudget link = link_budget(cfg, dev, gain, power, true);
  const double tau = cfg.iteration_duration_s;
  if (link.tx_time_s > tau * (1.0 + kBoundarySlack)) return dec;

  const double f = dev.cpu_freq_hz;
  const double energy_per_unit = cfg.capacitance * dev.cycles_per_unit * f * f;
  // Leftover energy and leftover time bound the batch identically in
  // exact arithmetic; the min guards rounding in the power inversion.
  const double batch_energy = (spend_cap_j - link.tx_energy_j) / energy_per_unit;
  const double batch_time = (tau - link.tx_time_s) * f / dev.cycles_per_unit;
  const double batch = std::min(batch_energy, batch_time);
  // Reject vanishing batches: a budget sitting on the threshold boundary
  // would otherwise upload nothing while draining the battery.
  if (!(batch > 1e-9)) return dec;

  dec.power_w = power;
  dec.batch = batch;
  dec.upload = true;
  dec.objective = batch - budget_quanta * slope;
  return dec;
}

DeviceDecision optimize_device(const SystemConfig& cfg, const DeviceConfig& dev,
                               int battery_level, double gain, double slope) {
  DeviceDecision best;
  best.level = battery_level;

  const double f = dev.cpu_freq_hz;
  const double energy_per_unit = cfg.capacitance * dev.cycles_per_unit * f * f;
  // A quantum of training energy buys 1/(alpha*C*f^2) units of data; if
  // that is worth no more than the slope, no budget is worth spending.
  if (1.0 / energy_per_unit - slope <= 0.0) return best;

  const double emax_j = max_energy_budget(cfg, dev, gain);
  const int cap =
      std::min(battery_level, energy_to_quanta(emax_j, cfg.energy_quantum_j));
  for (int k = 1; k <= cap; ++k) {
    DeviceDecision cand = decision_for_budget(cfg, dev, gain, k, slope);
    cand.level = battery_level;
    if (cand.objective > best.objective) best = cand;
  }
  return best;
}

std::vector<DeviceDecision> schedule_decisions(const SystemConfig& cfg,
                                               const GlobalState& state,
                                               const std::vector<ValueSlope>& slopes) {
  std::vector<DeviceDecision> decisions(cfg.num_devices());
  for (int n = 0; n < cfg.num_devices(); ++n) {
    const double gain = cfg.channel_levels[state.channel[n]].gain;
    const int level = state.battery[n];
    decisions[n] =
        optimize_device(cfg, cfg.devices[n], level, gain, slopes[n].at(level));
  }
  return decisions;
}

void select_top_l(const SystemConfig& cfg, std::vector<DeviceDecision>& decisions) {
  const int n = static_cast<int>(decisions.size());
  int uploads = 0;
  for (const auto& d : decisions) uploads += d.upload ? 1 : 0;
  if (uploads <= cfg.num_subchannels) return;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return decisions[a].objective > decisions[b].objective;
  });
  for (int rank = cfg.num_subchannels; rank < n; ++rank) {
    DeviceDecision& d = decisions[order[rank]];
    const int level = d.level;
    d = DeviceDecision{};
    d.level = level;
  }
}

Action decisions_to_action(const std::vector<DeviceDecision>& decisions) {
  Action a = Action::zeros(static_cast<int>(decisions.size()));
  for (size_t n = 0; n < decisions.size(); ++n) {
    a.batch[n] = decisions[n].batch;
    a.upload[n] = decisions[n].upload ? 1 : 0;
    a.power[n] = decisions[n].power_w;
    a.energy_budget[n] = decisions[n].budget;
  }
  return a;
}

Action schedule(const SystemConfig& cfg, const GlobalState& state,
                const std::vector<ValueSlope>& slopes) {
  std::vector<DeviceDecision> decisions = schedule_decisions(cfg, state, slopes);
  select_top_l(cfg, decisions);
  return decisions_to_action(decisions);
}

}  // namespace flsched
