#pragma once

// Experiment orchestration: closed-loop episodes coupling environment and
// policy, parameter sweeps over the arrival rate / battery capacity /
// CPU cost / CPU frequency, policy-surface dumps and convergence traces,
// and the CSV + manifest emission behind the CLI.

#include "flsched/baselines.hpp"
#include "flsched/environment.hpp"
#include "flsched/learning.hpp"
#include "flsched/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flsched {

inline constexpr const char* kSoftwareVersion = "0.1.0";
inline constexpr int kCsvSchemaVersion = 1;

enum class SweepVar { None, ArrivalRate, BatteryCapacity, CyclesPerUnit, CpuFreq };

const char* sweep_var_name(SweepVar var);
std::optional<SweepVar> parse_sweep_var(const std::string& name);

// Applies one sweep value to every device of the config copy.
SystemConfig apply_sweep(const SystemConfig& cfg, SweepVar var, double value);

struct ExperimentSpec {
  SystemConfig base;
  LearnOptions learn;
  SweepVar sweep_var = SweepVar::ArrivalRate;
  std::vector<double> sweep_values = {1, 2, 3, 4, 5};
  std::vector<PolicyKind> policies = {PolicyKind::Proposed, PolicyKind::CsiBased,
                                      PolicyKind::Myopic, PolicyKind::Random};
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int64_t horizon = 5000;
  int64_t burn_in = 1000;
  int csi_cutoff_level = -1;  // -1: median fading level
  int64_t trace_every = 1;    // trace-row cadence for single episodes
  int jobs = 1;               // worker threads for sweeps
  std::string config_hash;    // stamped into the run manifest
};

// Throws ValidationError unless horizon > burn_in >= 0 and the seed,
// value and policy lists are nonempty.
void validate_spec(const ExperimentSpec& spec);

struct MetricsRecord {
  PolicyKind policy{};
  SweepVar sweep_var = SweepVar::None;
  double sweep_value = 0.0;
  uint64_t seed = 0;
  double avg_utility = 0.0;          // post-burn-in mean of sum_n batch*upload
  std::vector<double> outage_freq;   // per device, start-of-iteration level == 0
  double avg_power_w = 0.0;          // post-burn-in mean of mean_n P_n
  int64_t convergence_iter = -1;     // first iteration under both tolerances

  double outage_max() const;
  double outage_mean() const;
};

struct TraceRow {
  int64_t iter = 0;
  int device = 0;
  int battery = 0;  // level the action was decided from
  int channel = 0;  // fading level index
  int budget = 0;
  double power_w = 0.0;
  double batch = 0.0;
  int upload = 0;
  double reward = 0.0;
  double gamma = 0.0;
  double dv_inf = 0.0;
};

struct EpisodeResult {
  MetricsRecord metrics;
  std::vector<TraceRow> trace;
};

// Steps the environment for `horizon` iterations under the policy;
// averages everything over the post-burn-in window. trace_every = 0
// disables trace rows.
EpisodeResult run_episode(const SystemConfig& cfg, const LearnOptions& learn,
                          PolicyKind kind, uint64_t seed, int64_t horizon,
                          int64_t burn_in, int csi_cutoff_level = -1,
                          int64_t trace_every = 0);

// Cartesian product policies x sweep values x seeds, in deterministic
// row order regardless of spec.jobs.
std::vector<MetricsRecord> run_sweep(const ExperimentSpec& spec);

struct SurfaceRow {
  int device = 0;
  int channel_level = 0;
  int battery_level = 0;
  int budget = 0;
  double power_w = 0.0;
  double batch = 0.0;
  int upload = 0;
  double objective = 0.0;
};

// Per-device decision the scheduler would take at every (fading level,
// battery level) pair, under the trained value tables. The subchannel
// selection stage is irrelevant for a single device and is skipped.
std::vector<SurfaceRow> dump_policy_surface(const SystemConfig& cfg,
                                            const LearnerState& trained,
                                            int device = 0);

struct ConvergenceRow {
  int64_t iter = 0;
  double dv_inf = 0.0;
  double dgamma_inf = 0.0;
  std::vector<double> device0_values;
};

// Full-horizon learning run (no early stop) recording the step-to-step
// value movement and the first device's table each iteration.
std::vector<ConvergenceRow> convergence_trace(const SystemConfig& cfg,
                                              const LearnOptions& learn, uint64_t seed,
                                              int64_t horizon);

// CSV emission; all files start with a header row and format doubles
// with enough digits to round-trip, so identical runs are byte-identical.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);
void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records);
void write_summary_csv(std::ostream& os, const std::vector<MetricsRecord>& records);
void write_surface_csv(std::ostream& os, const std::vector<SurfaceRow>& rows);
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

// Run manifest: schema + software version, command, config hash, seeds.
void write_manifest(std::ostream& os, const std::string& command,
                    const ExperimentSpec& spec);

std::string format_double(double x);

}  // namespace flsched
