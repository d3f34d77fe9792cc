#include "flsched/model.hpp"

#include "flsched/physics.hpp"

#include <cmath>
#include <sstream>

namespace flsched {

namespace {

void require(bool cond, const std::string& field, const std::string& msg) {
  if (!cond) throw ValidationError(field + ": " + msg);
}

void validate_device(const DeviceConfig& d, const std::string& path) {
  require(d.cycles_per_unit > 0, path + ".cycles_per_unit", "must be > 0");
  require(d.cpu_freq_hz > 0, path + ".cpu_freq_hz", "must be > 0");
  require(d.battery_capacity >= 1, path + ".battery_capacity", "must be >= 1");
  require(d.arrival_rate > 0, path + ".arrival_rate", "must be > 0");
  require(d.max_power_w > 0, path + ".max_power_w", "must be > 0");
  require(d.outage_limit > 0 && d.outage_limit < 1, path + ".outage_limit",
          "must be in (0,1)");
}

}  // namespace

SystemConfig validate_config(const SystemConfig& cfg) {
  require(!cfg.devices.empty(), "devices", "at least one device required");
  for (size_t n = 0; n < cfg.devices.size(); ++n)
    validate_device(cfg.devices[n], "devices[" + std::to_string(n) + "]");
  require(cfg.num_subchannels >= 1, "num_subchannels", "must be >= 1");
  require(cfg.bandwidth_hz > 0, "bandwidth_hz", "must be > 0");
  require(cfg.iteration_duration_s > 0, "iteration_duration_s", "must be > 0");
  require(cfg.capacitance > 0, "capacitance", "must be > 0");
  require(cfg.model_size_bits > 0, "model_size_bits", "must be > 0");
  require(cfg.noise_power_w > 0, "noise_power_w", "must be > 0");
  require(cfg.energy_quantum_j > 0, "energy_quantum_j", "must be > 0");
  require(!cfg.channel_levels.empty(), "channel_levels", "at least one level required");
  double psum = 0.0;
  double prev_gain = 0.0;
  for (size_t k = 0; k < cfg.channel_levels.size(); ++k) {
    const auto& lv = cfg.channel_levels[k];
    const std::string path = "channel_levels[" + std::to_string(k) + "]";
    require(lv.gain > 0, path + ".gain", "must be > 0");
    require(lv.gain > prev_gain, path + ".gain", "gains must be strictly increasing");
    require(lv.prob >= 0, path + ".prob", "must be >= 0");
    prev_gain = lv.gain;
    psum += lv.prob;
  }
  require(std::abs(psum - 1.0) <= 1e-12, "channel_levels",
          "probabilities must sum to 1");
  return cfg;
}

SystemConfig default_config() {
  SystemConfig cfg;
  cfg.devices.assign(10, DeviceConfig{});
  // Five fading levels, uniform, gains a factor 2.2 apart. With the
  // default noise power and power cap the full-power SNR ladder is
  // {0.62, 1.36, 3, 6.6, 14.5}: the worst level cannot deliver the
  // payload within one iteration on any battery in the simulated range,
  // and the second level only barely (full battery, most of it spent on
  // the uplink).
  const double mid_gain = 7.5e-13;
  const double step = 2.2;
  cfg.channel_levels = {
      {mid_gain / (step * step), 0.2}, {mid_gain / step, 0.2}, {mid_gain, 0.2},
      {mid_gain * step, 0.2}, {mid_gain * step * step, 0.2},
  };
  return cfg;
}

std::string FeasibilityReport::describe() const {
  if (ok()) return "feasible";
  std::ostringstream os;
  if (!delay_ok) os << "delay violated (device " << delay_device << "); ";
  if (!energy_ok) os << "energy causality violated (device " << energy_device << "); ";
  if (!power_ok) os << "power bound violated (device " << power_device << "); ";
  if (!subchannel_ok) os << "subchannel count exceeded; ";
  return os.str();
}

FeasibilityReport check_action_feasible(const SystemConfig& cfg,
                                        const GlobalState& state,
                                        const Action& a) {
  FeasibilityReport rep;
  const double tau = cfg.iteration_duration_s;
  const double time_slack = kBoundarySlack * std::max(tau, 1.0);
  int uploads = 0;
  for (int n = 0; n < cfg.num_devices(); ++n) {
    const DeviceConfig& dev = cfg.devices[n];
    const bool up = a.upload[n] != 0;
    uploads += up ? 1 : 0;

    if (rep.power_ok) {
      const bool box = a.power[n] >= 0.0 &&
                       a.power[n] <= dev.max_power_w * (1.0 + kBoundarySlack);
      const bool silent_ok = up || a.power[n] == 0.0;
      if (!box || !silent_ok) {
        rep.power_ok = false;
        rep.power_device = n;
      }
    }

    const double gain = cfg.channel_levels[state.channel[n]].gain;
    const ComputeBudget cop = compute_budget(dev, cfg.capacitance, a.batch[n]);
    const LinkBudget com = link_budget(cfg, dev, gain, a.power[n], up);

    if (rep.delay_ok && cop.cop_time_s + com.tx_time_s > tau + time_slack) {
      rep.delay_ok = false;
      rep.delay_device = n;
    }
    if (rep.energy_ok) {
      const int spend =
          energy_to_quanta(cop.cop_energy_j + com.tx_energy_j, cfg.energy_quantum_j);
      if (spend > state.battery[n]) {
        rep.energy_ok = false;
        rep.energy_device = n;
      }
    }
  }
  rep.subchannel_ok = uploads <= cfg.num_subchannels;
  return rep;
}

}  // namespace flsched
