#pragma once

// Test-only oracles, kept independent of the library's solvers.

#include <cmath>
#include <limits>
#include <vector>

#include "sqoa/instance.hpp"

namespace testsupport {

// Independent oracle for the critical speed: golden-section search on
// P(s)/s = s^(alpha-1) + g/s, which has a single stationary point. Search
// precision of comparison-based minimization is sqrt(machine epsilon), so the
// evaluation runs in extended precision to stay below 1e-9 relative.
inline double numeric_critical_speed(double alpha, double g) {
  const long double al = alpha, gl = g;
  auto f = [&](long double ls) {
    const long double s = std::exp(ls);
    return std::pow(s, al - 1.0L) + gl / s;
  };
  const long double phi = 0.5L * (std::sqrt(5.0L) - 1.0L);
  long double la = std::log(1e-6L), lb = std::log(1e6L);
  for (int i = 0; i < 120; ++i) {
    const long double l1 = lb - phi * (lb - la);
    const long double l2 = la + phi * (lb - la);
    if (f(l1) < f(l2))
      lb = l2;
    else
      la = l1;
  }
  // Comparison search flattens out at sqrt(eps); finish by bisecting the sign
  // of a central difference, which stays well above the rounding noise.
  long double lo = 0.5L * (la + lb) - 1e-4L, hi = 0.5L * (la + lb) + 1e-4L;
  const long double h = 1e-6L;
  for (int i = 0; i < 80; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (f(mid + h) - f(mid - h) > 0.0L)
      hi = mid;
    else
      lo = mid;
  }
  return static_cast<double>(std::exp(0.5L * (lo + hi)));
}

// Exhaustive search over per-slot speeds for the minimum dynamic energy
// (sum of s^alpha * dt) among EDF schedules meeting all deadlines. Recursion
// over slots with branch-and-bound on the incumbent; suitable for 2-3 jobs
// and a handful of slots only.
class SlotEnumerator {
 public:
  SlotEnumerator(const sqoa::Instance& inst, double alpha, double dt,
                 std::vector<double> speeds)
      : inst_(inst), alpha_(alpha), dt_(dt), speeds_(std::move(speeds)) {
    slots_ = static_cast<int>(std::ceil(inst.horizon / dt - 1e-9));
  }

  // +inf when no feasible schedule exists on the grid.
  double min_energy() {
    best_ = std::numeric_limits<double>::infinity();
    std::vector<double> rem;
    for (const auto& j : inst_.jobs) rem.push_back(j.volume);
    walk(0, rem, 0.0);
    return best_;
  }

 private:
  void walk(int slot, std::vector<double>& rem, double energy) {
    if (energy >= best_) return;
    const double t0 = slot * dt_;
    double left = 0.0;
    for (std::size_t i = 0; i < rem.size(); ++i) {
      if (rem[i] > 1e-9 && inst_.jobs[i].deadline <= t0 + 1e-9) return;  // missed
      left += rem[i];
    }
    // Jensen bound: finishing `left` work in the remaining time costs at least
    // the constant-speed energy.
    const double t_left = inst_.horizon - t0;
    if (left > 1e-9 && t_left > 1e-9 &&
        energy + t_left * std::pow(left / t_left, alpha_) >= best_)
      return;
    if (slot == slots_) {
      for (double r : rem)
        if (r > 1e-9) return;
      best_ = energy;
      return;
    }
    // EDF job for this slot
    int e = -1;
    for (std::size_t i = 0; i < rem.size(); ++i) {
      if (rem[i] <= 1e-9 || inst_.jobs[i].release > t0 + 1e-9) continue;
      if (e < 0 || inst_.jobs[i].deadline < inst_.jobs[e].deadline)
        e = static_cast<int>(i);
    }
    if (e < 0) {
      walk(slot + 1, rem, energy);
      return;
    }
    for (double s : speeds_) {
      const double de = std::pow(s, alpha_) * dt_;
      const double old = rem[e];
      rem[e] = std::max(0.0, old - s * dt_);
      walk(slot + 1, rem, energy + de);
      rem[e] = old;
    }
  }

  const sqoa::Instance& inst_;
  double alpha_, dt_;
  std::vector<double> speeds_;
  int slots_;
  double best_ = std::numeric_limits<double>::infinity();
};

inline std::vector<double> speed_ladder(double step, double top) {
  std::vector<double> s;
  for (double v = 0.0; v <= top + 1e-12; v += step) s.push_back(v);
  return s;
}

}  // namespace testsupport
