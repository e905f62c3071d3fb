#pragma once

#include <stdexcept>
#include <string>

#include "sqoa/common.hpp"
#include "sqoa/instance.hpp"
#include "sqoa/pending.hpp"
#include "sqoa/power.hpp"

namespace sqoa {

enum class PolicyKind { OA, AVR, qOA, SOA, SqOA };

struct Policy {
  PolicyKind kind = PolicyKind::SqOA;
  double q = 0.0;  // optional override for qOA/SqOA; <= 0 uses the model's q
};

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::OA: return "oa";
    case PolicyKind::AVR: return "avr";
    case PolicyKind::qOA: return "qoa";
    case PolicyKind::SOA: return "soa";
    case PolicyKind::SqOA: return "sqoa";
  }
  return "?";
}

inline PolicyKind policy_from_string(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "oa") return PolicyKind::OA;
  if (s == "avr") return PolicyKind::AVR;
  if (s == "qoa") return PolicyKind::qOA;
  if (s == "soa") return PolicyKind::SOA;
  if (s == "sqoa") return PolicyKind::SqOA;
  throw std::invalid_argument("unknown policy: " + s);
}

// OA and AVR have no sleep rule; in the sleep model they stay idle at speed
// zero, still paying static power.
inline bool manages_sleep(PolicyKind k) {
  return k == PolicyKind::SOA || k == PolicyKind::SqOA;
}

// OA is qOA at q = 1 and SOA is SqOA at q = 1.
inline double effective_q(const Policy& pol, const PowerParams& p) {
  switch (pol.kind) {
    case PolicyKind::OA:
    case PolicyKind::AVR:
    case PolicyKind::SOA: return 1.0;
    default: return pol.q > 0.0 ? pol.q : p.q;
  }
}

struct ProcessorState {
  Mode mode = Mode::sleep;
  double last_working = 0.0;  // last instant spent working; 0 before any work
};

struct Decision {
  Mode mode;
  double speed;
  bool wake = false;  // sleep -> working transition, charges the wake energy
};

namespace detail {
// Relative band for rho-vs-s* and timeout comparisons; keeps exactly-located
// events from being missed to rounding while staying far above double noise.
constexpr double kBranchTol = 1e-12;
}  // namespace detail

// Transition rule of the sleep-managed policies (SOA at q = 1, SqOA at q).
//   working: speed q*rho when rho >= s*, s* when 0 < rho < s*, idle when no work;
//   idle:    resume when rho >= s*, sleep once idle time reaches L/g;
//   sleep:   wake when rho >= s*.
// A simultaneous resume condition and sleep timeout resolves to working.
inline Decision sqoa_decision(const ProcessorState& st, double rho, const PowerParams& p,
                              double q, double t) {
  const double s_star = critical_speed(p);
  const bool high = rho >= s_star * (1.0 - detail::kBranchTol);
  switch (st.mode) {
    case Mode::working:
      if (high) return {Mode::working, q * rho, false};
      if (rho > 0.0) return {Mode::working, s_star, false};
      return {Mode::idle, 0.0, false};
    case Mode::idle: {
      if (high) return {Mode::working, q * rho, false};
      const double idle_for = (t - st.last_working) * p.static_power;
      if (idle_for >= p.wake_energy * (1.0 - detail::kBranchTol) - 1e-15)
        return {Mode::sleep, 0.0, false};
      return {Mode::idle, 0.0, false};
    }
    case Mode::sleep:
      if (high) return {Mode::working, q * rho, true};
      return {Mode::sleep, 0.0, false};
  }
  return {Mode::idle, 0.0, false};
}

// AVR's prescribed rate: total density of the job windows containing t.
inline double avr_rate(const Instance& inst, double t) {
  double s = 0.0;
  for (const Job& j : inst.jobs)
    if (j.release <= t && t < j.deadline) s += job_density(j);
  return s;
}

// Working-state speed of a policy given the pending work.
inline double policy_speed(const Policy& pol, const Instance& inst, const PendingWork& pending,
                           double t0, const PowerParams& p) {
  const double q = effective_q(pol, p);
  switch (pol.kind) {
    case PolicyKind::AVR:
      return pending.empty() ? 0.0 : avr_rate(inst, t0);
    case PolicyKind::OA:
    case PolicyKind::qOA:
      return q * max_density(pending, t0).rho;
    case PolicyKind::SOA:
    case PolicyKind::SqOA: {
      const Decision d =
          sqoa_decision({Mode::working, t0}, max_density(pending, t0).rho, p, q, t0);
      return d.mode == Mode::working ? d.speed : 0.0;
    }
  }
  return 0.0;
}

}  // namespace sqoa
