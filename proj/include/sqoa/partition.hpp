#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sqoa/pending.hpp"
#include "sqoa/power.hpp"

namespace sqoa {

// One interval of the excess-work partition.
struct CriticalInterval {
  double t_lo = 0.0, t_hi = 0.0;
  double density = 0.0;          // excess density g_i
  double density_clamped = 0.0;  // max(s*, g_i)
  double w_alg = 0.0, w_opt = 0.0;
  double excess = 0.0;  // max(0, w_alg - w_opt)
};

// Critical times t0 < t1 < ... < th with strictly decreasing excess densities;
// the last time is the latest pending deadline.
struct CriticalPartition {
  double t0 = 0.0;
  std::vector<CriticalInterval> intervals;
  double end() const { return intervals.empty() ? t0 : intervals.back().t_hi; }
};

// Iterative construction: each next time is the latest deadline maximizing the
// excess density of the interval it closes.
inline CriticalPartition critical_partition(const PendingWork& alg, const PendingWork& opt,
                                            double t0, double s_star) {
  CriticalPartition part;
  part.t0 = t0;
  std::vector<double> deadlines;
  for (const auto& it : alg)
    if (it.deadline > t0) deadlines.push_back(it.deadline);
  for (const auto& it : opt)
    if (it.deadline > t0) deadlines.push_back(it.deadline);
  std::sort(deadlines.begin(), deadlines.end());
  deadlines.erase(std::unique(deadlines.begin(), deadlines.end()), deadlines.end());
  if (deadlines.empty()) return part;

  const double d_max = deadlines.back();
  double cur = t0;
  while (cur < d_max - 1e-15) {
    double best_g = -1.0, best_t = d_max;
    for (double d : deadlines) {
      if (d <= cur) continue;
      const double g = excess_work(alg, opt, cur, d) / (d - cur);
      if (g >= best_g) {  // ties resolve to the latest deadline
        best_g = g;
        best_t = d;
      }
    }
    part.intervals.push_back({cur, best_t, best_g, std::max(s_star, best_g),
                              work_in_range(alg, cur, best_t), work_in_range(opt, cur, best_t),
                              excess_work(alg, opt, cur, best_t)});
    cur = best_t;
  }
  return part;
}

// phi = beta * sum_i ghat_i^(alpha-1) * (excess over interval i). The clamped
// field uses d(t_i, t_{i+1}) = max{0, w_a - w_o}; raw keeps the signed
// difference. The two agree on every interval with positive excess density,
// so they can only differ on the trailing zero-density interval.
struct PotentialValue {
  double clamped = 0.0;
  double raw = 0.0;
};

inline PotentialValue potential(const CriticalPartition& part, double beta, double alpha) {
  PotentialValue v;
  for (const CriticalInterval& iv : part.intervals) {
    const double w = std::pow(iv.density_clamped, alpha - 1.0);
    v.clamped += beta * w * iv.excess;
    v.raw += beta * w * (iv.w_alg - iv.w_opt);
  }
  return v;
}

}  // namespace sqoa
