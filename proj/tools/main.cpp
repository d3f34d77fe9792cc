// Command-line front end: single episodes, experiment sweeps, trained
// policy-surface dumps and convergence traces, all emitting CSV plus a
// run manifest into the output directory.

#include "flsched/config_io.hpp"
#include "flsched/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace flsched;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  uint64_t seed = 1;
  bool seed_given = false;
  int64_t horizon = -1;
  int64_t burn_in = -1;
  std::string policy = "proposed";
};

ExperimentSpec load_spec(const CommonArgs& args) {
  ExperimentSpec spec =
      args.config_path.empty() ? default_spec() : load_config_file(args.config_path);
  if (args.horizon > 0) spec.horizon = args.horizon;
  if (args.burn_in >= 0) spec.burn_in = args.burn_in;
  if (args.seed_given) spec.seeds = {args.seed};
  validate_spec(spec);
  return spec;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

void emit_manifest(const CommonArgs& args, const ExperimentSpec& spec,
                   const std::string& command) {
  auto os = open_output(args.out_dir, "manifest.json");
  write_manifest(os, command, spec);
}

int cmd_simulate(const CommonArgs& args) {
  ExperimentSpec spec = load_spec(args);
  const auto kind = parse_policy(args.policy);
  if (!kind) {
    std::cerr << "unknown policy: " << args.policy << "\n";
    return 1;
  }
  const uint64_t seed = spec.seeds.front();
  const EpisodeResult ep =
      run_episode(spec.base, spec.learn, *kind, seed, spec.horizon, spec.burn_in,
                  spec.csi_cutoff_level, spec.trace_every);
  {
    auto os = open_output(args.out_dir, "trace.csv");
    write_trace_csv(os, ep.trace);
  }
  {
    auto os = open_output(args.out_dir, "metrics.csv");
    write_metrics_csv(os, {ep.metrics});
  }
  spec.seeds = {seed};
  spec.policies = {*kind};
  emit_manifest(args, spec, "simulate");

  std::cout << "policy=" << policy_name(*kind) << " seed=" << seed
            << " horizon=" << spec.horizon << " burn_in=" << spec.burn_in << "\n"
            << "avg_utility=" << format_double(ep.metrics.avg_utility)
            << " avg_power=" << format_double(ep.metrics.avg_power_w)
            << " outage_max=" << format_double(ep.metrics.outage_max())
            << " convergence_iter=" << ep.metrics.convergence_iter << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args, int jobs) {
  ExperimentSpec spec = load_spec(args);
  if (jobs > 0) spec.jobs = jobs;
  const std::vector<MetricsRecord> records = run_sweep(spec);
  {
    auto os = open_output(args.out_dir, "sweep_runs.csv");
    write_metrics_csv(os, records);
  }
  {
    auto os = open_output(args.out_dir, "sweep_summary.csv");
    write_summary_csv(os, records);
  }
  emit_manifest(args, spec, "sweep");
  std::cout << "wrote " << records.size() << " runs to " << args.out_dir << "\n";
  return 0;
}

int cmd_policy_dump(const CommonArgs& args) {
  ExperimentSpec spec = load_spec(args);
  const uint64_t seed = spec.seeds.front();
  Environment env(spec.base, seed);
  LearnOptions opts = spec.learn;
  opts.max_iters = spec.horizon;
  const LearnResult trained = learn(spec.base, env, opts);
  const auto rows = dump_policy_surface(spec.base, trained.state, /*device=*/0);
  {
    auto os = open_output(args.out_dir, "policy_surface.csv");
    write_surface_csv(os, rows);
  }
  spec.seeds = {seed};
  emit_manifest(args, spec, "policy-dump");
  std::cout << "trained " << trained.iterations << " iterations (converged="
            << (trained.converged ? "yes" : "no") << "), wrote " << rows.size()
            << " surface rows\n";
  return 0;
}

int cmd_convergence(const CommonArgs& args) {
  ExperimentSpec spec = load_spec(args);
  const uint64_t seed = spec.seeds.front();
  const auto rows = convergence_trace(spec.base, spec.learn, seed, spec.horizon);
  {
    auto os = open_output(args.out_dir, "convergence.csv");
    write_convergence_csv(os, rows);
  }
  spec.seeds = {seed};
  emit_manifest(args, spec, "convergence");
  std::cout << "wrote " << rows.size() << " convergence rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware client scheduling simulator for wireless federated learning"};
  app.require_subcommand(1);

  CommonArgs args;
  int jobs = 0;

  auto add_common = [&](CLI::App* cmd, bool with_policy) {
    cmd->add_option("--config", args.config_path, "config file path");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master RNG seed")
        ->each([&](const std::string&) { args.seed_given = true; });
    cmd->add_option("--horizon", args.horizon, "iterations per episode");
    cmd->add_option("--burn-in", args.burn_in, "iterations excluded from averages");
    if (with_policy)
      cmd->add_option("--policy", args.policy, "proposed|csi|myopic|random");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run one episode");
  add_common(simulate, true);
  CLI::App* sweep = app.add_subcommand("sweep", "run the configured experiment sweep");
  add_common(sweep, false);
  sweep->add_option("--jobs", jobs, "worker threads");
  CLI::App* dump = app.add_subcommand("policy-dump", "train, then dump the decision surface");
  add_common(dump, false);
  CLI::App* conv = app.add_subcommand("convergence", "record the learning trace");
  add_common(conv, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(args);
    if (sweep->parsed()) return cmd_sweep(args, jobs);
    if (dump->parsed()) return cmd_policy_dump(args);
    if (conv->parsed()) return cmd_convergence(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
