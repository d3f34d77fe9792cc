#include "flsched/environment.hpp"

#include "flsched/physics.hpp"

#include <algorithm>

namespace flsched {

Environment::Environment(const SystemConfig& cfg, uint64_t seed) : cfg_(cfg) {
  const int n = cfg_.num_devices();
  arrival_rng_.reserve(n);
  channel_rng_.reserve(n);
  arrival_pmf_.reserve(n);
  for (int i = 0; i < n; ++i) {
    arrival_rng_.push_back(derive_stream(seed, StreamPurpose::Arrival, i));
    channel_rng_.push_back(derive_stream(seed, StreamPurpose::Channel, i));
    arrival_pmf_.push_back(arrival_pmf(cfg_.devices[i], 1e-12));
  }
  state_.battery.assign(n, 0);
  state_.channel = sample_channel(channel_rng_, cfg_);
}

StepResult Environment::step(const Action& a) {
  const int n = cfg_.num_devices();
  StepResult res;
  res.arrivals.resize(n);
  res.spend_quanta.resize(n);
  res.reward.resize(n);
  res.next_battery.resize(n);
  res.outage.resize(n);

  for (int i = 0; i < n; ++i) {
    const DeviceConfig& dev = cfg_.devices[i];
    const double gain = cfg_.channel_levels[state_.channel[i]].gain;
    const bool up = a.upload[i] != 0;
    const ComputeBudget cop = compute_budget(dev, cfg_.capacitance, a.batch[i]);
    const LinkBudget com = link_budget(cfg_, dev, gain, a.power[i], up);
    const int spend =
        energy_to_quanta(cop.cop_energy_j + com.tx_energy_j, cfg_.energy_quantum_j);
    const int arrival = sample_from_pmf(arrival_rng_[i], arrival_pmf_[i]);

    const int drained = std::max(state_.battery[i] - spend, 0);
    const int next = std::min(drained + arrival, dev.battery_capacity);

    res.spend_quanta[i] = spend;
    res.arrivals[i] = arrival;
    res.reward[i] = up ? a.batch[i] : 0.0;
    res.total_reward += res.reward[i];
    res.next_battery[i] = next;
    state_.battery[i] = next;
    res.outage[i] = next == 0 ? 1 : 0;
  }
  state_.channel = sample_channel(channel_rng_, cfg_);
  ++iter_;
  return res;
}

}  // namespace flsched
