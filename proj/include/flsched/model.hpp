#pragma once

// Core domain types for the wireless federated-learning scheduling
// simulator: per-device and system-wide configuration, the global
// (channel, battery) state, per-device actions, and the feasibility
// checks shared by every policy.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace flsched {

// Thrown by validate_config and the config parser; the message carries
// the path of the offending field, e.g. "devices[3].arrival_rate".
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct DeviceConfig {
  double cycles_per_unit = 1e10;  // CPU cycles to train one data unit (C)
  double cpu_freq_hz = 2e9;       // CPU frequency (f)
  int battery_capacity = 6;       // max battery level in energy quanta (E^max)
  double arrival_rate = 3.0;      // mean energy arrival, quanta/iteration (lambda)
  double max_power_w = 0.8;       // transmit power cap (P^max)
  double outage_limit = 0.04;     // allowed long-run empty-battery frequency
};

struct ChannelLevel {
  double gain = 1.0;  // uplink channel gain for this fading level
  double prob = 1.0;  // stationary probability of the level
};

struct SystemConfig {
  std::vector<DeviceConfig> devices;
  int num_subchannels = 5;           // orthogonal uplink subchannels (L)
  double bandwidth_hz = 1e5;         // per-subchannel bandwidth (W)
  double iteration_duration_s = 10;  // synchronized iteration length (tau)
  double capacitance = 1e-28;        // effective chipset capacitance (alpha)
  double model_size_bits = 1e6;      // uplink payload per model update
  double noise_power_w = 2e-13;      // AWGN power (sigma^2)
  std::vector<ChannelLevel> channel_levels;
  double energy_quantum_j = 1.0;  // Joules per battery level
  double ml_coefficient = 1.0;    // model-dependent coefficient; kept in the
                                  // config for completeness, not used by any
                                  // formula in this simulator

  int num_devices() const { return static_cast<int>(devices.size()); }
};

// Battery levels and channel fading indices for one iteration.
struct GlobalState {
  std::vector<int> battery;  // per device, in {0..E^max_n}
  std::vector<int> channel;  // per device, index into channel_levels
};

// Per-device control for one iteration. `energy_budget` is the integer
// quanta the decision intends to draw from the battery; the physical
// consumption is derived from (batch, power, upload).
struct Action {
  std::vector<double> batch;       // training data size (b), data units
  std::vector<uint8_t> upload;     // upload flag (epsilon)
  std::vector<double> power;       // transmit power (P), W
  std::vector<int> energy_budget;  // budgeted quanta (deltaE)

  static Action zeros(int n) {
    Action a;
    a.batch.assign(n, 0.0);
    a.upload.assign(n, 0);
    a.power.assign(n, 0.0);
    a.energy_budget.assign(n, 0);
    return a;
  }
};

// Slack absorbed when converting Joules to quanta or checking the delay
// budget, so that decisions constructed to sit exactly on a constraint
// boundary do not flip infeasible from floating-point noise.
inline constexpr double kBoundarySlack = 1e-9;

// Joules -> integer quanta at the accounting boundary (round up).
inline int energy_to_quanta(double joules, double quantum_j) {
  if (joules <= 0.0) return 0;
  return static_cast<int>(std::ceil(joules / quantum_j - kBoundarySlack));
}

// Checks all type invariants; returns the config unchanged on success and
// throws ValidationError naming the first violated field otherwise.
SystemConfig validate_config(const SystemConfig& cfg);

// Default parameter set used when a config file omits a section. Ten
// identical devices, five uniform channel levels spaced by a factor of 3
// around a mid-level SNR of 3 at full power.
SystemConfig default_config();

struct FeasibilityReport {
  bool delay_ok = true;       // tau^cop + tau^com <= tau, each device
  bool energy_ok = true;      // ceil(E^com + E^cop) <= battery, each device
  bool power_ok = true;       // 0 <= P <= P^max and upload=0 => P=0
  bool subchannel_ok = true;  // sum(upload) <= L
  int delay_device = -1;
  int energy_device = -1;
  int power_device = -1;

  bool ok() const { return delay_ok && energy_ok && power_ok && subchannel_ok; }
  std::string describe() const;
};

// Per-constraint pass/fail for one action in one state. The long-run
// outage constraint is a trajectory property and is checked by the
// experiment harness, not here.
FeasibilityReport check_action_feasible(const SystemConfig& cfg,
                                        const GlobalState& state,
                                        const Action& a);

}  // namespace flsched
