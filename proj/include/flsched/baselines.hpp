#pragma once

// Reference policies the learned scheduler is compared against: myopic
// (per-iteration utility only), CSI-based (myopic gated on the current
// channel level), and uniformly random feasible actions.

#include "flsched/environment.hpp"
#include "flsched/learning.hpp"
#include "flsched/model.hpp"
#include "flsched/stochastics.hpp"

#include <memory>
#include <optional>
#include <string>

namespace flsched {

enum class PolicyKind { Proposed, CsiBased, Myopic, Random };

const char* policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(const std::string& name);

// Instantaneous utility maximization: the scheduler with all value
// slopes forced to zero.
Action myopic_policy(const SystemConfig& cfg, const GlobalState& state);

// Devices at or above the cutoff fading level act myopically, the rest
// stay silent; top-L selection applies as usual. cutoff_level < 0 picks
// the median level.
Action csi_policy(const SystemConfig& cfg, const GlobalState& state,
                  int cutoff_level = -1);

// Uniform budget over each device's feasible grid, resolved to a
// physical action by the usual case analysis; a uniformly random subset
// of L uploaders is kept when the subchannels oversubscribe.
Action random_policy(const SystemConfig& cfg, const GlobalState& state, Rng& rng);

// Stateful wrapper for episode runs. csi_cutoff_level only affects
// CsiBased; schedule/tail_tol only affect Proposed; seed only Random.
std::unique_ptr<SchedulingPolicy> make_policy(PolicyKind kind, const SystemConfig& cfg,
                                              uint64_t seed,
                                              StepSchedule schedule = {},
                                              double arrival_tail_tol = 1e-12,
                                              int csi_cutoff_level = -1);

}  // namespace flsched
