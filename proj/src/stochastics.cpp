#include "flsched/stochastics.hpp"

#include <cmath>
#include <stdexcept>

namespace flsched {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng derive_stream(uint64_t master_seed, StreamPurpose purpose, int device) {
  uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ static_cast<uint64_t>(purpose));
  s = splitmix64(s ^ (static_cast<uint64_t>(device) + 1));
  return Rng(s);
}

ArrivalPmf arrival_pmf(const DeviceConfig& dev, double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol <= 1e-6))
    throw std::invalid_argument("arrival_pmf: tail_tol must be in (0, 1e-6]");
  const double lambda = dev.arrival_rate;
  ArrivalPmf pmf;
  pmf.rate = lambda;

  double p = std::exp(-lambda);  // Poisson(0)
  double cumulative = 0.0;
  int k = 0;
  // Grow until the upper tail past k falls below tail_tol. The recurrence
  // p_{k+1} = p_k * lambda/(k+1) is stable for the moderate rates used
  // here (lambda <= 30 in all experiments).
  while (cumulative + p < 1.0 - tail_tol) {
    pmf.probs.push_back(p);
    cumulative += p;
    ++k;
    p *= lambda / k;
    if (k > 10000) break;
  }
  // Lump the remaining mass so the pmf sums to 1 exactly.
  const double last = 1.0 - cumulative;
  pmf.tail_mass = std::max(0.0, last - p);
  pmf.probs.push_back(last);
  return pmf;
}

int sample_from_pmf(Rng& rng, const ArrivalPmf& pmf) {
  double u = rng.next_double();
  const int n = static_cast<int>(pmf.probs.size());
  for (int k = 0; k < n; ++k) {
    u -= pmf.probs[k];
    if (u < 0.0) return k;
  }
  return n - 1;
}

int sample_arrival(Rng& rng, const DeviceConfig& dev) {
  const ArrivalPmf pmf = arrival_pmf(dev, 1e-12);
  return sample_from_pmf(rng, pmf);
}

int sample_channel_level(Rng& rng, const SystemConfig& cfg) {
  double u = rng.next_double();
  const int n = static_cast<int>(cfg.channel_levels.size());
  for (int k = 0; k < n; ++k) {
    u -= cfg.channel_levels[k].prob;
    if (u < 0.0) return k;
  }
  return n - 1;
}

std::vector<int> sample_channel(std::vector<Rng>& device_rngs, const SystemConfig& cfg) {
  std::vector<int> levels(device_rngs.size());
  for (size_t n = 0; n < device_rngs.size(); ++n)
    levels[n] = sample_channel_level(device_rngs[n], cfg);
  return levels;
}

}  // namespace flsched
