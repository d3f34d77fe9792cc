#include "flsched/config_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace flsched {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0;
  size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

class ParseCursor {
 public:
  ParseCursor(int line, const std::string& key) : line_(line), key_(key) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("config line " + std::to_string(line_) + " (" + key_ +
                          "): " + msg);
  }

  double as_double(const std::string& value) const {
    try {
      size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) fail("trailing characters in number");
      return v;
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected a number, got '" + value + "'");
    }
  }

  int64_t as_int(const std::string& value) const {
    const double v = as_double(value);
    const auto i = static_cast<int64_t>(std::llround(v));
    if (std::abs(v - static_cast<double>(i)) > 1e-9) fail("expected an integer");
    return i;
  }

  uint64_t as_u64(const std::string& value) const {
    try {
      size_t used = 0;
      const uint64_t v = std::stoull(value, &used);
      if (used != value.size()) fail("trailing characters in integer");
      return v;
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected an unsigned integer, got '" + value + "'");
    }
  }

 private:
  int line_;
  const std::string& key_;
};

}  // namespace

ExperimentSpec default_spec() {
  ExperimentSpec spec;
  spec.base = default_config();
  spec.config_hash = config_hash(spec);
  return spec;
}

ExperimentSpec parse_config_text(const std::string& text) {
  ExperimentSpec spec;
  spec.base = default_config();

  std::vector<DeviceConfig> devices;
  std::vector<double> gains;
  std::vector<double> probs;
  bool devices_given = false;
  bool channel_given = false;

  std::string section;
  DeviceConfig cur_device;
  int cur_count = 1;
  auto flush_device = [&] {
    for (int i = 0; i < cur_count; ++i) devices.push_back(cur_device);
    cur_device = DeviceConfig{};
    cur_count = 1;
  };

  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    if (const size_t hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("config line " + std::to_string(line_no) +
                              ": malformed section header");
      if (section == "device") flush_device();
      section = trim(line.substr(1, line.size() - 2));
      if (section != "system" && section != "device" && section != "channel" &&
          section != "learning" && section != "experiment")
        throw ValidationError("config line " + std::to_string(line_no) +
                              ": unknown section [" + section + "]");
      if (section == "device") devices_given = true;
      if (section == "channel") channel_given = true;
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const ParseCursor at(line_no, key);
    if (section.empty()) at.fail("entry before any [section]");

    if (section == "system") {
      if (key == "num_subchannels")
        spec.base.num_subchannels = static_cast<int>(at.as_int(value));
      else if (key == "bandwidth_hz")
        spec.base.bandwidth_hz = at.as_double(value);
      else if (key == "iteration_duration_s")
        spec.base.iteration_duration_s = at.as_double(value);
      else if (key == "capacitance")
        spec.base.capacitance = at.as_double(value);
      else if (key == "model_size_bits")
        spec.base.model_size_bits = at.as_double(value);
      else if (key == "noise_power_w")
        spec.base.noise_power_w = at.as_double(value);
      else if (key == "energy_quantum_j")
        spec.base.energy_quantum_j = at.as_double(value);
      else if (key == "ml_coefficient")
        spec.base.ml_coefficient = at.as_double(value);
      else
        at.fail("unknown key in [system]");
    } else if (section == "device") {
      if (key == "cycles_per_unit")
        cur_device.cycles_per_unit = at.as_double(value);
      else if (key == "cpu_freq_hz")
        cur_device.cpu_freq_hz = at.as_double(value);
      else if (key == "battery_capacity")
        cur_device.battery_capacity = static_cast<int>(at.as_int(value));
      else if (key == "arrival_rate")
        cur_device.arrival_rate = at.as_double(value);
      else if (key == "max_power_w")
        cur_device.max_power_w = at.as_double(value);
      else if (key == "outage_limit")
        cur_device.outage_limit = at.as_double(value);
      else if (key == "count")
        cur_count = static_cast<int>(at.as_int(value));
      else
        at.fail("unknown key in [device]");
    } else if (section == "channel") {
      if (key == "gains") {
        gains.clear();
        for (const std::string& g : split_list(value)) gains.push_back(at.as_double(g));
      } else if (key == "probs") {
        probs.clear();
        for (const std::string& p : split_list(value)) probs.push_back(at.as_double(p));
      } else {
        at.fail("unknown key in [channel]");
      }
    } else if (section == "learning") {
      if (key == "step_v_scale")
        spec.learn.schedule.v_scale = at.as_double(value);
      else if (key == "step_v_exponent")
        spec.learn.schedule.v_exponent = at.as_double(value);
      else if (key == "step_gamma_scale")
        spec.learn.schedule.gamma_scale = at.as_double(value);
      else if (key == "step_gamma_exponent")
        spec.learn.schedule.gamma_exponent = at.as_double(value);
      else if (key == "tol_v")
        spec.learn.tol_v = at.as_double(value);
      else if (key == "tol_gamma")
        spec.learn.tol_gamma = at.as_double(value);
      else if (key == "arrival_tail_tol")
        spec.learn.arrival_tail_tol = at.as_double(value);
      else if (key == "snapshot_every")
        spec.learn.snapshot_every = at.as_int(value);
      else
        at.fail("unknown key in [learning]");
    } else if (section == "experiment") {
      if (key == "horizon")
        spec.horizon = at.as_int(value);
      else if (key == "burn_in")
        spec.burn_in = at.as_int(value);
      else if (key == "csi_cutoff_level")
        spec.csi_cutoff_level = static_cast<int>(at.as_int(value));
      else if (key == "trace_every")
        spec.trace_every = at.as_int(value);
      else if (key == "jobs")
        spec.jobs = static_cast<int>(at.as_int(value));
      else if (key == "seeds") {
        spec.seeds.clear();
        for (const std::string& s : split_list(value)) spec.seeds.push_back(at.as_u64(s));
      } else if (key == "sweep") {
        const auto var = parse_sweep_var(value);
        if (!var) at.fail("unknown sweep variable '" + value + "'");
        spec.sweep_var = *var;
      } else if (key == "sweep_values") {
        spec.sweep_values.clear();
        for (const std::string& v : split_list(value))
          spec.sweep_values.push_back(at.as_double(v));
      } else if (key == "policies") {
        spec.policies.clear();
        for (const std::string& p : split_list(value)) {
          const auto kind = parse_policy(p);
          if (!kind) at.fail("unknown policy '" + p + "'");
          spec.policies.push_back(*kind);
        }
      } else {
        at.fail("unknown key in [experiment]");
      }
    }
  }
  if (section == "device") flush_device();

  if (devices_given) spec.base.devices = devices;
  if (channel_given) {
    if (gains.size() != probs.size())
      throw ValidationError("channel: gains and probs must have the same length");
    spec.base.channel_levels.clear();
    for (size_t k = 0; k < gains.size(); ++k)
      spec.base.channel_levels.push_back({gains[k], probs[k]});
  }

  validate_config(spec.base);
  spec.config_hash = config_hash(spec);
  return spec;
}

ExperimentSpec load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string canonical_config_string(const ExperimentSpec& spec) {
  std::ostringstream os;
  const SystemConfig& c = spec.base;
  os << "system:" << c.num_subchannels << ',' << format_double(c.bandwidth_hz) << ','
     << format_double(c.iteration_duration_s) << ',' << format_double(c.capacitance)
     << ',' << format_double(c.model_size_bits) << ','
     << format_double(c.noise_power_w) << ',' << format_double(c.energy_quantum_j)
     << ',' << format_double(c.ml_coefficient) << '\n';
  for (const DeviceConfig& d : c.devices)
    os << "device:" << format_double(d.cycles_per_unit) << ','
       << format_double(d.cpu_freq_hz) << ',' << d.battery_capacity << ','
       << format_double(d.arrival_rate) << ',' << format_double(d.max_power_w) << ','
       << format_double(d.outage_limit) << '\n';
  for (const ChannelLevel& lv : c.channel_levels)
    os << "channel:" << format_double(lv.gain) << ',' << format_double(lv.prob) << '\n';
  os << "learning:" << format_double(spec.learn.schedule.v_scale) << ','
     << format_double(spec.learn.schedule.v_exponent) << ','
     << format_double(spec.learn.schedule.gamma_scale) << ','
     << format_double(spec.learn.schedule.gamma_exponent) << ','
     << format_double(spec.learn.tol_v) << ',' << format_double(spec.learn.tol_gamma)
     << ',' << format_double(spec.learn.arrival_tail_tol) << '\n';
  os << "experiment:" << spec.horizon << ',' << spec.burn_in << ','
     << spec.csi_cutoff_level << ',' << sweep_var_name(spec.sweep_var);
  for (double v : spec.sweep_values) os << ',' << format_double(v);
  for (uint64_t s : spec.seeds) os << ",s" << s;
  for (PolicyKind p : spec.policies) os << ',' << policy_name(p);
  os << '\n';
  return os.str();
}

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (const char ch : data) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const ExperimentSpec& spec) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config_string(spec))));
  return buf;
}

}  // namespace flsched
