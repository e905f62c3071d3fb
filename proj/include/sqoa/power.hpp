#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqoa/common.hpp"

namespace sqoa {

// Energy model of a speed-scalable processor with a sleep state. Active power
// at speed s is s^alpha + static_power; sleeping is free but every sleep ->
// active transition costs wake_energy.
struct PowerParams {
  double alpha;         // power-law exponent, > 1
  double static_power;  // leakage paid in working and idle states, > 0
  double wake_energy;   // sleep -> active transition cost, >= 0
  double q;             // speed multiplier used by qOA/SqOA, >= 1
};

inline double default_q(double alpha) { return 2.0 - 1.0 / alpha; }

// q <= 0 selects the default 2 - 1/alpha.
inline PowerParams make_power_params(double alpha, double static_power, double wake_energy,
                                     double q = 0.0) {
  if (!(alpha > 1.0)) throw std::invalid_argument("power model: alpha must be > 1");
  if (!(static_power > 0.0))
    throw std::invalid_argument("power model: static power must be > 0");
  if (!(wake_energy >= 0.0))
    throw std::invalid_argument("power model: wake energy must be >= 0");
  const double qq = q <= 0.0 ? default_q(alpha) : q;
  if (!(qq >= 1.0)) throw std::invalid_argument("power model: q must be >= 1");
  return PowerParams{alpha, static_power, wake_energy, qq};
}

// Instantaneous power draw.
inline double power(const PowerParams& p, double speed, Mode mode) {
  if (speed < 0.0) throw std::domain_error("power: negative speed");
  if (mode == Mode::sleep) return 0.0;
  return std::pow(speed, p.alpha) + p.static_power;
}

// The speed minimizing energy per unit of work: (g/(alpha-1))^(1/alpha).
inline double critical_speed(const PowerParams& p) {
  return std::pow(p.static_power / (p.alpha - 1.0), 1.0 / p.alpha);
}

// P(s)/s, minimized at the critical speed.
inline double energy_per_work(const PowerParams& p, double speed) {
  if (!(speed > 0.0)) throw std::domain_error("energy_per_work: speed must be > 0");
  return power(p, speed, Mode::working) / speed;
}

enum class BoundKind { SqOA, SOA };

// Proven worst-case total-energy ratios. The SqOA bound is stated for the
// default q = 2 - 1/alpha.
inline double competitive_bound(const PowerParams& p, BoundKind which) {
  double c;
  if (which == BoundKind::SqOA) {
    const double q = default_q(p.alpha);
    c = std::pow(q, p.alpha) * std::pow(2.0, p.alpha - 1.0);
  } else {
    c = std::pow(p.alpha, p.alpha);
  }
  return std::max(4.0, 2.0 + c);
}

// Constants of the amortized analysis: potential weight beta, working-energy
// ratio c (beta = c = q^alpha * 2^(alpha-1)) and total-energy ratio
// max{c + 2, 4}.
struct AnalysisConstants {
  double beta;
  double c;
  double c_total;
};

inline AnalysisConstants analysis_constants(const PowerParams& p) {
  const double c = std::pow(p.q, p.alpha) * std::pow(2.0, p.alpha - 1.0);
  return {c, c, std::max(4.0, c + 2.0)};
}

}  // namespace sqoa
