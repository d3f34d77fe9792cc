#include "flsched/harness.hpp"

#include "flsched/physics.hpp"
#include "flsched/scheduler.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <thread>

namespace flsched {

const char* sweep_var_name(SweepVar var) {
  switch (var) {
    case SweepVar::None: return "none";
    case SweepVar::ArrivalRate: return "lambda";
    case SweepVar::BatteryCapacity: return "battery";
    case SweepVar::CyclesPerUnit: return "cycles";
    case SweepVar::CpuFreq: return "freq";
  }
  return "?";
}

std::optional<SweepVar> parse_sweep_var(const std::string& name) {
  if (name == "none") return SweepVar::None;
  if (name == "lambda") return SweepVar::ArrivalRate;
  if (name == "battery") return SweepVar::BatteryCapacity;
  if (name == "cycles") return SweepVar::CyclesPerUnit;
  if (name == "freq") return SweepVar::CpuFreq;
  return std::nullopt;
}

SystemConfig apply_sweep(const SystemConfig& cfg, SweepVar var, double value) {
  SystemConfig out = cfg;
  for (DeviceConfig& dev : out.devices) {
    switch (var) {
      case SweepVar::None: break;
      case SweepVar::ArrivalRate: dev.arrival_rate = value; break;
      case SweepVar::BatteryCapacity: {
        const int levels = static_cast<int>(std::llround(value));
        if (std::abs(value - levels) > 1e-9)
          throw ValidationError("sweep_values: battery capacity must be integral");
        dev.battery_capacity = levels;
        break;
      }
      case SweepVar::CyclesPerUnit: dev.cycles_per_unit = value; break;
      case SweepVar::CpuFreq: dev.cpu_freq_hz = value; break;
    }
  }
  return out;
}

void validate_spec(const ExperimentSpec& spec) {
  validate_config(spec.base);
  if (spec.burn_in < 0) throw ValidationError("burn_in: must be >= 0");
  if (spec.horizon <= spec.burn_in)
    throw ValidationError("horizon: must exceed burn_in");
  if (spec.seeds.empty()) throw ValidationError("seeds: must be nonempty");
  if (spec.policies.empty()) throw ValidationError("policies: must be nonempty");
  if (spec.sweep_var != SweepVar::None && spec.sweep_values.empty())
    throw ValidationError("sweep_values: must be nonempty");
}

double MetricsRecord::outage_max() const {
  return outage_freq.empty() ? 0.0
                             : *std::max_element(outage_freq.begin(), outage_freq.end());
}

double MetricsRecord::outage_mean() const {
  if (outage_freq.empty()) return 0.0;
  return std::accumulate(outage_freq.begin(), outage_freq.end(), 0.0) /
         static_cast<double>(outage_freq.size());
}

EpisodeResult run_episode(const SystemConfig& cfg, const LearnOptions& learn,
                          PolicyKind kind, uint64_t seed, int64_t horizon,
                          int64_t burn_in, int csi_cutoff_level, int64_t trace_every) {
  Environment env(cfg, seed);
  auto policy = make_policy(kind, cfg, seed, learn.schedule, learn.arrival_tail_tol,
                            csi_cutoff_level);
  const int n = cfg.num_devices();

  EpisodeResult out;
  out.metrics.policy = kind;
  out.metrics.seed = seed;
  out.metrics.outage_freq.assign(n, 0.0);

  const auto* learned = dynamic_cast<const ProposedPolicy*>(policy.get());
  double utility_sum = 0.0;
  double power_sum = 0.0;
  std::vector<int64_t> outage_count(n, 0);
  const int64_t window = horizon - burn_in;

  for (int64_t t = 0; t < horizon; ++t) {
    const GlobalState prev = env.state();
    if (t >= burn_in)
      for (int i = 0; i < n; ++i) outage_count[i] += prev.battery[i] == 0 ? 1 : 0;

    const Action a = policy->decide(prev);
    const StepResult r = env.step(a);
    policy->observe(prev, a, r);

    if (t >= burn_in) {
      utility_sum += r.total_reward;
      double p = 0.0;
      for (int i = 0; i < n; ++i) p += a.power[i];
      power_sum += p / n;
    }
    if (learned && out.metrics.convergence_iter < 0 && t + 1 >= learn.min_iters &&
        learned->last_delta_v() < learn.tol_v &&
        learned->last_delta_gamma() < learn.tol_gamma)
      out.metrics.convergence_iter = t;

    if (trace_every > 0 && t % trace_every == 0) {
      for (int i = 0; i < n; ++i) {
        TraceRow row;
        row.iter = t;
        row.device = i;
        row.battery = prev.battery[i];
        row.channel = prev.channel[i];
        row.budget = a.energy_budget[i];
        row.power_w = a.power[i];
        row.batch = a.batch[i];
        row.upload = a.upload[i];
        row.reward = r.reward[i];
        row.gamma = learned ? learned->learner().multipliers[i] : 0.0;
        row.dv_inf = learned ? learned->last_delta_v() : 0.0;
        out.trace.push_back(row);
      }
    }
  }

  out.metrics.avg_utility = utility_sum / static_cast<double>(window);
  out.metrics.avg_power_w = power_sum / static_cast<double>(window);
  for (int i = 0; i < n; ++i)
    out.metrics.outage_freq[i] =
        static_cast<double>(outage_count[i]) / static_cast<double>(window);
  return out;
}

std::vector<MetricsRecord> run_sweep(const ExperimentSpec& spec) {
  validate_spec(spec);
  struct Cell {
    PolicyKind policy;
    double value;
    uint64_t seed;
  };
  std::vector<Cell> grid;
  const std::vector<double> values =
      spec.sweep_var == SweepVar::None ? std::vector<double>{0.0} : spec.sweep_values;
  for (PolicyKind policy : spec.policies)
    for (double value : values)
      for (uint64_t seed : spec.seeds) grid.push_back({policy, value, seed});

  std::vector<MetricsRecord> records(grid.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&] {
    for (size_t i = cursor.fetch_add(1); i < grid.size(); i = cursor.fetch_add(1)) {
      const Cell& cell = grid[i];
      const SystemConfig cfg = apply_sweep(spec.base, spec.sweep_var, cell.value);
      EpisodeResult ep = run_episode(cfg, spec.learn, cell.policy, cell.seed,
                                     spec.horizon, spec.burn_in,
                                     spec.csi_cutoff_level, /*trace_every=*/0);
      ep.metrics.sweep_var = spec.sweep_var;
      ep.metrics.sweep_value = cell.value;
      records[i] = std::move(ep.metrics);
    }
  };

  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

std::vector<SurfaceRow> dump_policy_surface(const SystemConfig& cfg,
                                            const LearnerState& trained, int device) {
  const DeviceConfig& dev = cfg.devices[device];
  const ValueSlope slope = value_slope(trained.tables.v[device]);
  std::vector<SurfaceRow> rows;
  for (size_t c = 0; c < cfg.channel_levels.size(); ++c) {
    for (int e = 0; e <= dev.battery_capacity; ++e) {
      const DeviceDecision dec =
          optimize_device(cfg, dev, e, cfg.channel_levels[c].gain, slope.at(e));
      SurfaceRow row;
      row.device = device;
      row.channel_level = static_cast<int>(c);
      row.battery_level = e;
      row.budget = dec.budget;
      row.power_w = dec.power_w;
      row.batch = dec.batch;
      row.upload = dec.upload ? 1 : 0;
      row.objective = dec.objective;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_trace(const SystemConfig& cfg,
                                              const LearnOptions& learn_opts,
                                              uint64_t seed, int64_t horizon) {
  Environment env(cfg, seed);
  LearnOptions opts = learn_opts;
  opts.max_iters = horizon;
  opts.tol_v = 0.0;  // never stop before the horizon
  opts.tol_gamma = 0.0;
  opts.snapshot_every = 1;
  const LearnResult res = learn(cfg, env, opts);

  std::vector<ConvergenceRow> rows(res.iterations);
  for (int64_t t = 0; t < res.iterations; ++t) {
    rows[t].iter = t;
    rows[t].dv_inf = res.dv_trace[t];
    rows[t].dgamma_inf = res.dgamma_trace[t];
    rows[t].device0_values = res.snapshots[t].second.v[0];
  }
  return rows;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "iter,device,battery,channel,budget,power,batch,upload,reward,gamma,dv_inf\n";
  for (const TraceRow& r : rows) {
    os << r.iter << ',' << r.device << ',' << r.battery << ',' << r.channel << ','
       << r.budget << ',' << format_double(r.power_w) << ',' << format_double(r.batch)
       << ',' << r.upload << ',' << format_double(r.reward) << ','
       << format_double(r.gamma) << ',' << format_double(r.dv_inf) << '\n';
  }
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records) {
  os << "policy,sweep_var,sweep_value,seed,avg_utility,avg_power,outage_mean,"
        "outage_max,convergence_iter\n";
  for (const MetricsRecord& m : records) {
    os << policy_name(m.policy) << ',' << sweep_var_name(m.sweep_var) << ','
       << format_double(m.sweep_value) << ',' << m.seed << ','
       << format_double(m.avg_utility) << ',' << format_double(m.avg_power_w) << ','
       << format_double(m.outage_mean()) << ',' << format_double(m.outage_max()) << ','
       << m.convergence_iter << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<MetricsRecord>& records) {
  os << "policy,sweep_var,sweep_value,n_seeds,utility_mean,utility_sd,power_mean,"
        "outage_max_mean\n";
  // Group in first-appearance order by (policy, sweep value).
  std::vector<std::pair<PolicyKind, double>> keys;
  for (const MetricsRecord& m : records) {
    const std::pair<PolicyKind, double> key{m.policy, m.sweep_value};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& key : keys) {
    std::vector<const MetricsRecord*> group;
    for (const MetricsRecord& m : records)
      if (m.policy == key.first && m.sweep_value == key.second) group.push_back(&m);
    const double k = static_cast<double>(group.size());
    double mean = 0.0, power = 0.0, outage = 0.0;
    for (const auto* m : group) {
      mean += m->avg_utility;
      power += m->avg_power_w;
      outage += m->outage_max();
    }
    mean /= k;
    power /= k;
    outage /= k;
    double var = 0.0;
    for (const auto* m : group) var += (m->avg_utility - mean) * (m->avg_utility - mean);
    const double sd = group.size() > 1 ? std::sqrt(var / (k - 1.0)) : 0.0;
    os << policy_name(key.first) << ',' << sweep_var_name(records.front().sweep_var)
       << ',' << format_double(key.second) << ',' << group.size() << ','
       << format_double(mean) << ',' << format_double(sd) << ','
       << format_double(power) << ',' << format_double(outage) << '\n';
  }
}

void write_surface_csv(std::ostream& os, const std::vector<SurfaceRow>& rows) {
  os << "device,channel_level,battery_level,budget,power,batch,upload,objective\n";
  for (const SurfaceRow& r : rows) {
    os << r.device << ',' << r.channel_level << ',' << r.battery_level << ','
       << r.budget << ',' << format_double(r.power_w) << ',' << format_double(r.batch)
       << ',' << r.upload << ',' << format_double(r.objective) << '\n';
  }
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "iter,dv_inf,dgamma_inf";
  if (!rows.empty())
    for (size_t l = 0; l < rows.front().device0_values.size(); ++l) os << ",v0_" << l;
  os << '\n';
  for (const ConvergenceRow& r : rows) {
    os << r.iter << ',' << format_double(r.dv_inf) << ',' << format_double(r.dgamma_inf);
    for (double v : r.device0_values) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_manifest(std::ostream& os, const std::string& command,
                    const ExperimentSpec& spec) {
  nlohmann::json j;
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["software_version"] = kSoftwareVersion;
  j["command"] = command;
  j["config_hash"] = spec.config_hash;
  j["seeds"] = spec.seeds;
  j["horizon"] = spec.horizon;
  j["burn_in"] = spec.burn_in;
  std::vector<std::string> names;
  for (PolicyKind p : spec.policies) names.push_back(policy_name(p));
  j["policies"] = names;
  j["sweep_var"] = sweep_var_name(spec.sweep_var);
  j["sweep_values"] = spec.sweep_values;
  os << j.dump(2) << '\n';
}

}  // namespace flsched
