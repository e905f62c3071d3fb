#pragma once

#include <algorithm>
#include <vector>

#include "sqoa/common.hpp"

namespace sqoa {

// Released, unfinished work keyed by deadline.
struct PendingItem {
  double deadline;
  double remaining;
};

// Sorted by deadline, deadlines unique, remaining > 0.
using PendingWork = std::vector<PendingItem>;

inline PendingWork make_pending(std::vector<PendingItem> items) {
  items.erase(std::remove_if(items.begin(), items.end(),
                             [](const PendingItem& it) { return !(it.remaining > 0.0); }),
              items.end());
  std::sort(items.begin(), items.end(),
            [](const PendingItem& a, const PendingItem& b) { return a.deadline < b.deadline; });
  PendingWork out;
  for (const auto& it : items) {
    if (!out.empty() && out.back().deadline == it.deadline)
      out.back().remaining += it.remaining;
    else
      out.push_back(it);
  }
  return out;
}

// Total remaining work with deadline in (t_lo, t_hi].
inline double work_in_range(const PendingWork& pw, double t_lo, double t_hi) {
  double sum = 0.0;
  for (const auto& it : pw)
    if (it.deadline > t_lo && it.deadline <= t_hi) sum += it.remaining;
  return sum;
}

struct DensityPoint {
  double rho = 0.0;
  double t1 = 0.0;   // latest deadline attaining the maximum
  bool any = false;  // false when nothing is pending
};

// Highest prefix density max_{t > t0} w(t0, t] / (t - t0); ties take the
// latest deadline. Deadlines at or before t0 are ignored (a feasible caller
// never leaves work there).
inline DensityPoint max_density(const PendingWork& pw, double t0) {
  DensityPoint best;
  double prefix = 0.0;
  for (const auto& it : pw) {
    if (it.deadline <= t0) continue;
    prefix += it.remaining;
    const double rho = prefix / (it.deadline - t0);
    if (!best.any || rho >= best.rho) best = {rho, it.deadline, true};
  }
  return best;
}

// max{0, w_alg(t_lo, t_hi] - w_opt(t_lo, t_hi]}.
inline double excess_work(const PendingWork& alg, const PendingWork& opt, double t_lo,
                          double t_hi) {
  return std::max(0.0, work_in_range(alg, t_lo, t_hi) - work_in_range(opt, t_lo, t_hi));
}

}  // namespace sqoa
