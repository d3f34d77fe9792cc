#pragma once

// Config file loading. The format is flat key = value text in five
// sections: [system], repeated [device] blocks, [channel], [learning]
// and [experiment]. Every key has a default; unknown keys and malformed
// values are errors. The full schema is documented in the README.

#include "flsched/harness.hpp"
#include "flsched/model.hpp"

#include <cstdint>
#include <string>

namespace flsched {

// All defaults: Table-scale system (10 devices, 5 subchannels), five
// uniform fading levels, 5000-iteration horizon with 1000 burn-in.
ExperimentSpec default_spec();

// Parses config text into a validated spec; throws ValidationError with
// a line reference on any malformed or unknown entry.
ExperimentSpec parse_config_text(const std::string& text);

// Reads and parses the file at path.
ExperimentSpec load_config_file(const std::string& path);

// Stable serialization of everything that affects results, used for the
// manifest hash.
std::string canonical_config_string(const ExperimentSpec& spec);

uint64_t fnv1a64(const std::string& data);

// Hex FNV-1a of the canonical serialization.
std::string config_hash(const ExperimentSpec& spec);

}  // namespace flsched
