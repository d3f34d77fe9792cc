#include "flsched/baselines.hpp"

#include "flsched/physics.hpp"
#include "flsched/scheduler.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace flsched {

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Proposed: return "proposed";
    case PolicyKind::CsiBased: return "csi";
    case PolicyKind::Myopic: return "myopic";
    case PolicyKind::Random: return "random";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(const std::string& name) {
  if (name == "proposed") return PolicyKind::Proposed;
  if (name == "csi") return PolicyKind::CsiBased;
  if (name == "myopic") return PolicyKind::Myopic;
  if (name == "random") return PolicyKind::Random;
  return std::nullopt;
}

namespace {

std::vector<ValueSlope> zero_slopes(const SystemConfig& cfg) {
  std::vector<ValueSlope> slopes(cfg.devices.size());
  for (size_t n = 0; n < cfg.devices.size(); ++n)
    slopes[n].d.assign(cfg.devices[n].battery_capacity + 1, 0.0);
  return slopes;
}

}  // namespace

Action myopic_policy(const SystemConfig& cfg, const GlobalState& state) {
  return schedule(cfg, state, zero_slopes(cfg));
}

Action csi_policy(const SystemConfig& cfg, const GlobalState& state, int cutoff_level) {
  if (cutoff_level < 0) cutoff_level = static_cast<int>(cfg.channel_levels.size()) / 2;
  std::vector<DeviceDecision> decisions(cfg.num_devices());
  for (int n = 0; n < cfg.num_devices(); ++n) {
    decisions[n].level = state.battery[n];
    if (state.channel[n] < cutoff_level) continue;
    const double gain = cfg.channel_levels[state.channel[n]].gain;
    decisions[n] =
        optimize_device(cfg, cfg.devices[n], state.battery[n], gain, 0.0);
  }
  select_top_l(cfg, decisions);
  return decisions_to_action(decisions);
}

Action random_policy(const SystemConfig& cfg, const GlobalState& state, Rng& rng) {
  std::vector<DeviceDecision> decisions(cfg.num_devices());
  std::vector<int> uploaders;
  for (int n = 0; n < cfg.num_devices(); ++n) {
    const DeviceConfig& dev = cfg.devices[n];
    const double gain = cfg.channel_levels[state.channel[n]].gain;
    const int cap = std::min(
        state.battery[n],
        energy_to_quanta(max_energy_budget(cfg, dev, gain), cfg.energy_quantum_j));
    const int budget = rng.next_below(cap + 1);
    decisions[n] = decision_for_budget(cfg, dev, gain, budget);
    decisions[n].level = state.battery[n];
    if (decisions[n].upload) uploaders.push_back(n);
  }

  const int limit = cfg.num_subchannels;
  if (static_cast<int>(uploaders.size()) > limit) {
    // Partial Fisher-Yates: keep a uniformly random subset of size L.
    for (int i = 0; i < limit; ++i) {
      const int j = i + rng.next_below(static_cast<int>(uploaders.size()) - i);
      std::swap(uploaders[i], uploaders[j]);
    }
    for (size_t i = limit; i < uploaders.size(); ++i) {
      const int level = decisions[uploaders[i]].level;
      decisions[uploaders[i]] = DeviceDecision{};
      decisions[uploaders[i]].level = level;
    }
  }
  return decisions_to_action(decisions);
}

namespace {

class MyopicPolicy : public SchedulingPolicy {
 public:
  explicit MyopicPolicy(SystemConfig cfg) : cfg_(std::move(cfg)) {}
  Action decide(const GlobalState& state) override { return myopic_policy(cfg_, state); }
  const char* name() const override { return "myopic"; }

 private:
  SystemConfig cfg_;
};

class CsiPolicy : public SchedulingPolicy {
 public:
  CsiPolicy(SystemConfig cfg, int cutoff) : cfg_(std::move(cfg)), cutoff_(cutoff) {}
  Action decide(const GlobalState& state) override {
    return csi_policy(cfg_, state, cutoff_);
  }
  const char* name() const override { return "csi"; }

 private:
  SystemConfig cfg_;
  int cutoff_;
};

class RandomPolicy : public SchedulingPolicy {
 public:
  RandomPolicy(SystemConfig cfg, uint64_t seed)
      : cfg_(std::move(cfg)), rng_(derive_stream(seed, StreamPurpose::Policy, 0)) {}
  Action decide(const GlobalState& state) override {
    return random_policy(cfg_, state, rng_);
  }
  const char* name() const override { return "random"; }

 private:
  SystemConfig cfg_;
  Rng rng_;
};

}  // namespace

std::unique_ptr<SchedulingPolicy> make_policy(PolicyKind kind, const SystemConfig& cfg,
                                              uint64_t seed, StepSchedule schedule,
                                              double arrival_tail_tol,
                                              int csi_cutoff_level) {
  switch (kind) {
    case PolicyKind::Proposed:
      return std::make_unique<ProposedPolicy>(cfg, schedule, arrival_tail_tol);
    case PolicyKind::CsiBased:
      return std::make_unique<CsiPolicy>(cfg, csi_cutoff_level);
    case PolicyKind::Myopic:
      return std::make_unique<MyopicPolicy>(cfg);
    case PolicyKind::Random:
      return std::make_unique<RandomPolicy>(cfg, seed);
  }
  return nullptr;
}

}  // namespace flsched
