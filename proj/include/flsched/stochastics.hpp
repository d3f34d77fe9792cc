#pragma once

// Seeded random processes: Poisson energy arrivals and discrete
// block-fading channel draws, plus the exact arrival pmf used by the
// expectation terms of the value updates. All sampling goes through
// inversion on explicitly computed pmfs so that draws are bit-exact
// across platforms for a given seed.

#include "flsched/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace flsched {

// Thin deterministic wrapper over mt19937_64. Uniform doubles come from
// the top 53 bits, never from std:: distributions (those vary between
// standard library implementations).
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}.
  int next_below(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

 private:
  std::mt19937_64 engine_;
};

// Purpose labels for deriving independent substreams from one master
// seed. Streams are keyed by (seed, purpose, device index) so adding a
// device never perturbs the draws of existing ones.
enum class StreamPurpose : uint64_t { Arrival = 1, Channel = 2, Policy = 3 };

Rng derive_stream(uint64_t master_seed, StreamPurpose purpose, int device);

// Truncated Poisson pmf. probs[k] is exact for k < k_max; the residual
// upper tail is lumped into probs[k_max] so the vector sums to 1 exactly.
struct ArrivalPmf {
  double rate = 0.0;
  std::vector<double> probs;
  double tail_mass = 0.0;  // mass folded into the last entry

  int k_max() const { return static_cast<int>(probs.size()) - 1; }
};

// Builds the pmf for the device's arrival rate; k_max is the smallest k
// whose upper tail mass drops below tail_tol. tail_tol must be in
// (0, 1e-6].
ArrivalPmf arrival_pmf(const DeviceConfig& dev, double tail_tol);

// Inversion sample from a truncated pmf.
int sample_from_pmf(Rng& rng, const ArrivalPmf& pmf);

// One Poisson draw of harvested quanta for the device.
int sample_arrival(Rng& rng, const DeviceConfig& dev);

// One fading-level index per device, each drawn from its own stream.
std::vector<int> sample_channel(std::vector<Rng>& device_rngs, const SystemConfig& cfg);

// Single-device inversion draw from the configured level distribution.
int sample_channel_level(Rng& rng, const SystemConfig& cfg);

}  // namespace flsched
