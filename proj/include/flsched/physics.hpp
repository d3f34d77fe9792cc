#pragma once

// Closed-form compute and radio formulas: local-training time/energy,
// uplink rate/time/energy, the threshold energy below which an upload
// cannot fit into one iteration, the largest energy spendable in one
// iteration, and the inversion from an energy budget back to the
// transmit power that realizes it.

#include "flsched/model.hpp"

#include <optional>

namespace flsched {

struct ComputeBudget {
  double cop_time_s = 0.0;    // local training time, linear in b
  double cop_energy_j = 0.0;  // local training energy, linear in b
};

struct LinkBudget {
  double rate_bps = 0.0;     // uplink rate R
  double tx_time_s = 0.0;    // payload / rate
  double tx_energy_j = 0.0;  // power * tx_time
};

// Training b data units: time b*C/f, energy alpha*b*C*f^2.
ComputeBudget compute_budget(const DeviceConfig& dev, double capacitance, double b);

// Uplink budget at power P over gain h. A silent device (upload=0 or P=0)
// gets an all-zero budget; the payload/rate ratio is never formed at P=0.
LinkBudget link_budget(const SystemConfig& cfg, const DeviceConfig& dev, double gain,
                       double power_w, bool upload);

// Minimum energy (J) needed to deliver the payload within one iteration
// over gain h: tau*sigma^2/h * (2^(M/(W*tau)) - 1). Spending at or below
// this leaves the upload unfinishable inside tau.
double threshold_energy(const SystemConfig& cfg, double gain);

// Total energy spent in an iteration that transmits at power P for the
// payload and trains for all remaining time:
//   (tau - M/R(P)) * alpha * f^3 + (M/R(P)) * P.
// Strictly increasing in P wherever the transmission fits into tau.
double budget_from_power(const SystemConfig& cfg, const DeviceConfig& dev, double gain,
                         double power_w);

// budget_from_power evaluated at P^max; the most a device can spend in one
// iteration over gain h. Returns 0 when even full power cannot deliver the
// payload within tau (dead link).
double max_energy_budget(const SystemConfig& cfg, const DeviceConfig& dev, double gain);

// Inverse of budget_from_power on (E^th, deltaE^max]: the unique power in
// (0, P^max] whose full-iteration spend equals budget_j. Uses the
// Lambert-W closed form when its residual verifies, otherwise bisection
// on the monotone map (the authoritative solver).
// Throws std::domain_error outside (E^th, deltaE^max].
double power_from_budget(const SystemConfig& cfg, const DeviceConfig& dev, double gain,
                         double budget_j);

// Closed-form candidate for power_from_budget; nullopt when the Lambert
// argument leaves the real domain or the residual check fails.
std::optional<double> power_from_budget_closed_form(const SystemConfig& cfg,
                                                    const DeviceConfig& dev,
                                                    double gain, double budget_j);

// Principal branch of the Lambert W function (w*e^w = x, w >= -1),
// defined for x >= -1/e. Halley iteration, residual below 1e-12 relative.
double lambert_w0(double x);

// Lower branch (w <= -1), defined for x in [-1/e, 0).
double lambert_wm1(double x);

}  // namespace flsched
