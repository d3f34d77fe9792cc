#include "flsched/physics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flsched {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

// One Halley step for f(w) = w*exp(w) - x.
double halley_step(double w, double x) {
  const double ew = std::exp(w);
  const double f = w * ew - x;
  const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
  return w - f / denom;
}

double halley_solve(double w, double x) {
  for (int i = 0; i < 60; ++i) {
    const double next = halley_step(w, x);
    if (!std::isfinite(next)) break;
    if (std::abs(next - w) <= 1e-16 * (1.0 + std::abs(next))) return next;
    w = next;
  }
  return w;
}

// Series around the branch point x = -1/e: w = -1 + p - p^2/3 + 11 p^3/72,
// with p = +-sqrt(2(e x + 1)) picking the branch.
double branch_point_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
}

}  // namespace

double lambert_w0(double x) {
  if (x < -kInvE - 1e-14) throw std::domain_error("lambert_w0: x < -1/e");
  if (x < -kInvE) x = -kInvE;
  const double q = 2.0 * (std::exp(1.0) * x + 1.0);
  if (q <= 0.0) return -1.0;
  double w;
  if (x < -0.25) {
    w = branch_point_series(std::sqrt(q));
  } else if (x < 2.0) {
    w = std::log1p(x > -0.999 ? x : -0.999);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley_solve(w, x);
}

double lambert_wm1(double x) {
  if (x < -kInvE - 1e-14 || x >= 0.0)
    throw std::domain_error("lambert_wm1: x outside [-1/e, 0)");
  if (x < -kInvE) x = -kInvE;
  const double q = 2.0 * (std::exp(1.0) * x + 1.0);
  if (q <= 0.0) return -1.0;
  double w;
  if (x < -0.27) {
    w = branch_point_series(-std::sqrt(q));
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley_solve(w, x);
}

ComputeBudget compute_budget(const DeviceConfig& dev, double capacitance, double b) {
  ComputeBudget out;
  out.cop_time_s = b * dev.cycles_per_unit / dev.cpu_freq_hz;
  out.cop_energy_j = capacitance * b * dev.cycles_per_unit * dev.cpu_freq_hz *
                     dev.cpu_freq_hz;
  return out;
}

LinkBudget link_budget(const SystemConfig& cfg, const DeviceConfig& /*dev*/,
                       double gain, double power_w, bool upload) {
  LinkBudget out;
  if (!upload || power_w <= 0.0) return out;
  out.rate_bps = cfg.bandwidth_hz * std::log2(1.0 + power_w * gain / cfg.noise_power_w);
  if (out.rate_bps <= 0.0) {
    out.tx_time_s = std::numeric_limits<double>::infinity();
    out.tx_energy_j = std::numeric_limits<double>::infinity();
    return out;
  }
  out.tx_time_s = cfg.model_size_bits / out.rate_bps;
  out.tx_energy_j = power_w * out.tx_time_s;
  return out;
}

double threshold_energy(const SystemConfig& cfg, double gain) {
  const double tau = cfg.iteration_duration_s;
  const double exponent = cfg.model_size_bits / (cfg.bandwidth_hz * tau);
  return tau * cfg.noise_power_w / gain * (std::exp2(exponent) - 1.0);
}

double budget_from_power(const SystemConfig& cfg, const DeviceConfig& dev, double gain,
                         double power_w) {
  if (power_w <= 0.0) throw std::domain_error("budget_from_power: power must be > 0");
  const double rate = cfg.bandwidth_hz * std::log2(1.0 + power_w * gain / cfg.noise_power_w);
  const double tx_time = cfg.model_size_bits / rate;
  const double f = dev.cpu_freq_hz;
  const double compute_power = cfg.capacitance * f * f * f;
  return (cfg.iteration_duration_s - tx_time) * compute_power + tx_time * power_w;
}

double max_energy_budget(const SystemConfig& cfg, const DeviceConfig& dev, double gain) {
  const double rate_max =
      cfg.bandwidth_hz * std::log2(1.0 + dev.max_power_w * gain / cfg.noise_power_w);
  if (rate_max <= 0.0) return 0.0;
  const double tx_time = cfg.model_size_bits / rate_max;
  if (tx_time > cfg.iteration_duration_s) return 0.0;
  const double f = dev.cpu_freq_hz;
  const double compute_power = cfg.capacitance * f * f * f;
  return (cfg.iteration_duration_s - tx_time) * compute_power + tx_time * dev.max_power_w;
}

std::optional<double> power_from_budget_closed_form(const SystemConfig& cfg,
                                                    const DeviceConfig& dev,
                                                    double gain, double budget_j) {
  const double tau = cfg.iteration_duration_s;
  const double snr_per_watt = gain / cfg.noise_power_w;
  const double f = dev.cpu_freq_hz;
  const double compute_power = cfg.capacitance * f * f * f;
  const double log_scale = cfg.model_size_bits * M_LN2 / cfg.bandwidth_hz;
  const double excess = budget_j - tau * compute_power;

  // Solve log_scale*(P - c) = excess*ln(1 + s*P) for P, c = compute power.
  if (std::abs(excess) <= 1e-12 * std::max(1.0, std::abs(budget_j))) {
    // Degenerate linear case: transmit power equals the compute power.
    return compute_power;
  }
  const double a = log_scale / (snr_per_watt * excess);
  const double c0 = a + log_scale * compute_power / excess;
  const double arg = -a * std::exp(-c0);
  if (!std::isfinite(arg) || arg < -kInvE) return std::nullopt;
  double w;
  if (excess < 0.0) {
    w = lambert_w0(arg);
  } else {
    if (arg >= 0.0) return std::nullopt;
    w = lambert_wm1(arg);
  }
  const double v = -w / a;  // v = 1 + s*P
  const double power = (v - 1.0) / snr_per_watt;
  if (!std::isfinite(power) || power <= 0.0) return std::nullopt;
  const double residual = budget_from_power(cfg, dev, gain, power) - budget_j;
  if (std::abs(residual) > 1e-9 * std::max(1.0, std::abs(budget_j))) return std::nullopt;
  return power;
}

double power_from_budget(const SystemConfig& cfg, const DeviceConfig& dev, double gain,
                         double budget_j) {
  const double eth = threshold_energy(cfg, gain);
  const double emax = max_energy_budget(cfg, dev, gain);
  if (!(budget_j > eth) || budget_j > emax * (1.0 + 1e-12))
    throw std::domain_error("power_from_budget: budget outside (E^th, deltaE^max]");

  if (auto p = power_from_budget_closed_form(cfg, dev, gain, budget_j))
    return std::min(*p, dev.max_power_w);

  // Bisection on the strictly increasing power -> budget map over
  // [P_th, P^max], where P_th is the power whose transmission exactly
  // fills the iteration (budget E^th).
  double lo = eth / cfg.iteration_duration_s;
  double hi = dev.max_power_w;
  for (int i = 0; i < 200 && (hi - lo) > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (budget_from_power(cfg, dev, gain, mid) < budget_j)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace flsched
