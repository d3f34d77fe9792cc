#include "flsched/stochastics.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace flsched;

namespace {

// Poisson upper tail P(A > k), computed from scratch in log space.
double poisson_tail_above(double lambda, int k) {
  double cum = 0.0;
  for (int j = 0; j <= k; ++j)
    cum += std::exp(j * std::log(lambda) - lambda - std::lgamma(j + 1.0));
  return 1.0 - cum;
}

}  // namespace

TEST_SUITE("stochastics") {

TEST_CASE("identical seeds give identical streams") {
  DeviceConfig dev;
  dev.arrival_rate = 2.0;
  Rng a = derive_stream(42, StreamPurpose::Arrival, 0);
  Rng b = derive_stream(42, StreamPurpose::Arrival, 0);
  for (int i = 0; i < 1000; ++i) CHECK(sample_arrival(a, dev) == sample_arrival(b, dev));

  const SystemConfig cfg = default_config();
  Rng c = derive_stream(42, StreamPurpose::Channel, 3);
  Rng d = derive_stream(42, StreamPurpose::Channel, 3);
  for (int i = 0; i < 1000; ++i)
    CHECK(sample_channel_level(c, cfg) == sample_channel_level(d, cfg));
}

TEST_CASE("streams differ across devices and purposes") {
  Rng a = derive_stream(42, StreamPurpose::Arrival, 0);
  Rng b = derive_stream(42, StreamPurpose::Arrival, 1);
  Rng c = derive_stream(42, StreamPurpose::Channel, 0);
  int equal_ab = 0;
  int equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const uint64_t x = a.next_u64();
    equal_ab += x == b.next_u64() ? 1 : 0;
    equal_ac += x == c.next_u64() ? 1 : 0;
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
}

TEST_CASE("unit-rate arrivals hit k=0 with frequency exp(-1)") {
  DeviceConfig dev;
  dev.arrival_rate = 1.0;
  const ArrivalPmf pmf = arrival_pmf(dev, 1e-12);
  Rng rng = derive_stream(7, StreamPurpose::Arrival, 0);
  int64_t zeros = 0;
  const int64_t n = 1'000'000;
  for (int64_t i = 0; i < n; ++i) zeros += sample_from_pmf(rng, pmf) == 0 ? 1 : 0;
  const double freq = static_cast<double>(zeros) / static_cast<double>(n);
  CHECK(std::abs(freq - std::exp(-1.0)) < 0.002);
}

TEST_CASE("vanishing rate degenerates to zero arrivals") {
  DeviceConfig dev;
  dev.arrival_rate = 1e-12;
  Rng rng = derive_stream(7, StreamPurpose::Arrival, 0);
  int64_t zeros = 0;
  const int64_t n = 100'000;
  for (int64_t i = 0; i < n; ++i) zeros += sample_arrival(rng, dev) == 0 ? 1 : 0;
  CHECK(static_cast<double>(zeros) / static_cast<double>(n) > 0.9999);
}

TEST_CASE("pmf entries are the exact Poisson masses below the lump") {
  DeviceConfig dev;
  dev.arrival_rate = 1.0;
  const ArrivalPmf pmf = arrival_pmf(dev, 1e-12);
  const double e1 = std::exp(-1.0);
  CHECK(pmf.probs[0] == doctest::Approx(e1).epsilon(1e-14));
  CHECK(pmf.probs[1] == doctest::Approx(e1).epsilon(1e-14));
  CHECK(pmf.probs[2] == doctest::Approx(e1 / 2).epsilon(1e-14));
  CHECK(pmf.tail_mass >= 0.0);
  CHECK(pmf.tail_mass < 1e-12);
}

TEST_CASE("the lump index is the smallest k with tail below tolerance") {
  for (const double lambda : {0.5, 1.0, 3.0, 8.0}) {
    DeviceConfig dev;
    dev.arrival_rate = lambda;
    const double tol = 1e-9;
    const ArrivalPmf pmf = arrival_pmf(dev, tol);
    const int k_max = pmf.k_max();
    CHECK(poisson_tail_above(lambda, k_max) < tol);
    if (k_max > 0) CHECK(poisson_tail_above(lambda, k_max - 1) >= tol);
  }
}

TEST_CASE("pmf sums to one exactly after lumping") {
  for (const double lambda : {1e-12, 0.5, 1.0, 2.0, 4.0, 30.0}) {
    DeviceConfig dev;
    dev.arrival_rate = lambda;
    const ArrivalPmf pmf = arrival_pmf(dev, 1e-12);
    double sum = 0.0;
    for (const double p : pmf.probs) sum += p;
    CHECK(sum == 1.0);
  }
}

TEST_CASE("mode of a rate-3 pmf sits at two or three") {
  DeviceConfig dev;
  dev.arrival_rate = 3.0;
  const ArrivalPmf pmf = arrival_pmf(dev, 1e-12);
  int argmax = 0;
  for (int k = 0; k <= pmf.k_max(); ++k)
    if (pmf.probs[k] > pmf.probs[argmax]) argmax = k;
  CHECK((argmax == 2 || argmax == 3));
}

TEST_CASE("sampled arrivals pass chi-square against the pmf") {
  for (const double lambda : {0.5, 1.0, 2.0, 4.0}) {
    DeviceConfig dev;
    dev.arrival_rate = lambda;
    const ArrivalPmf pmf = arrival_pmf(dev, 1e-12);
    Rng rng = derive_stream(1234, StreamPurpose::Arrival, 0);
    const int64_t n = 100'000;
    std::vector<int64_t> counts(pmf.probs.size(), 0);
    for (int64_t i = 0; i < n; ++i) ++counts[sample_from_pmf(rng, pmf)];
    const auto res = testutil::chi2_gof(counts, pmf.probs, n);
    CHECK(res.stat < testutil::chi2_critical_999(res.df));
  }
}

TEST_CASE("channel levels follow the configured distribution") {
  const SystemConfig cfg = default_config();  // uniform over 5 levels
  Rng rng = derive_stream(99, StreamPurpose::Channel, 0);
  const int64_t n = 1'000'000;
  std::vector<int64_t> counts(cfg.channel_levels.size(), 0);
  for (int64_t i = 0; i < n; ++i) ++counts[sample_channel_level(rng, cfg)];
  for (const int64_t c : counts)
    CHECK(std::abs(static_cast<double>(c) / n - 0.2) < 0.005);
}

TEST_CASE("a single-level distribution always draws that level") {
  SystemConfig cfg = default_config();
  cfg.channel_levels = {{1e-12, 1.0}};
  Rng rng = derive_stream(5, StreamPurpose::Channel, 0);
  for (int i = 0; i < 1000; ++i) CHECK(sample_channel_level(rng, cfg) == 0);
}

TEST_CASE("channel draws are uncorrelated across devices") {
  const SystemConfig cfg = default_config();
  std::vector<Rng> rngs;
  for (int i = 0; i < 4; ++i) rngs.push_back(derive_stream(17, StreamPurpose::Channel, i));
  const int64_t n = 100'000;
  std::vector<std::vector<int>> draws(4);
  for (int64_t t = 0; t < n; ++t) {
    const auto levels = sample_channel(rngs, cfg);
    for (int i = 0; i < 4; ++i) draws[i].push_back(levels[i]);
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      double mi = 0, mj = 0;
      for (int64_t t = 0; t < n; ++t) {
        mi += draws[i][t];
        mj += draws[j][t];
      }
      mi /= n;
      mj /= n;
      double cov = 0, vi = 0, vj = 0;
      for (int64_t t = 0; t < n; ++t) {
        cov += (draws[i][t] - mi) * (draws[j][t] - mj);
        vi += (draws[i][t] - mi) * (draws[i][t] - mi);
        vj += (draws[j][t] - mj) * (draws[j][t] - mj);
      }
      CHECK(std::abs(cov / std::sqrt(vi * vj)) < 0.01);
    }
  }
}

TEST_CASE("tail tolerance outside (0, 1e-6] is rejected") {
  DeviceConfig dev;
  CHECK_THROWS_AS(arrival_pmf(dev, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(arrival_pmf(dev, 1e-3), std::invalid_argument);
}

}  // TEST_SUITE
