#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sqoa/instance.hpp"
#include "sqoa/schedule.hpp"

namespace sqoa {

struct YdsResult {
  Schedule schedule;
  std::vector<double> densities;  // critical density extracted per round, non-increasing
};

// Minimum-dynamic-energy schedule: repeatedly extract the maximum-density
// interval (jobs whose whole window fits), run its jobs there at that constant
// speed under EDF, then exclude the interval from the remaining timeline.
// Candidate boundaries and containment are evaluated in "squeezed" time, i.e.
// with previously extracted intervals collapsed.
inline YdsResult yds_detailed(const Instance& inst) {
  YdsResult out;
  out.schedule.horizon = inst.horizon;
  const auto& jobs = inst.jobs;
  const int n = static_cast<int>(jobs.size());
  if (n == 0) return out;

  std::vector<char> active(n, 1);
  std::vector<std::pair<double, double>> blocked;  // claimed intervals, sorted, disjoint

  auto squeeze = [&](double x) {
    double m = 0.0;
    for (const auto& b : blocked) m += std::max(0.0, std::min(x, b.second) - b.first);
    return x - m;
  };
  auto block = [&](double lo, double hi) {
    blocked.push_back({lo, hi});
    std::sort(blocked.begin(), blocked.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& b : blocked) {
      if (!merged.empty() && b.first <= merged.back().second + 1e-15)
        merged.back().second = std::max(merged.back().second, b.second);
      else
        merged.push_back(b);
    }
    blocked = std::move(merged);
  };
  auto free_parts = [&](double lo, double hi) {
    std::vector<std::pair<double, double>> parts;
    double cur = lo;
    for (const auto& b : blocked) {
      if (b.second <= lo || b.first >= hi) continue;
      if (b.first > cur) parts.push_back({cur, std::min(b.first, hi)});
      cur = std::max(cur, b.second);
      if (cur >= hi) break;
    }
    if (cur < hi) parts.push_back({cur, hi});
    return parts;
  };

  std::vector<Segment> work;

  // EDF at constant speed over the free parts of the chosen interval.
  auto edf_pack = [&](const std::vector<int>& members, double speed,
                      const std::vector<std::pair<double, double>>& parts) {
    std::vector<double> rem(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) rem[i] = jobs[members[i]].volume;
    auto pick = [&](double t) {
      int best = -1;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (rem[i] <= 1e-12 || jobs[members[i]].release > t + 1e-12) continue;
        if (best < 0 || jobs[members[i]].deadline < jobs[members[best]].deadline ||
            (jobs[members[i]].deadline == jobs[members[best]].deadline &&
             jobs[members[i]].id < jobs[members[best]].id))
          best = static_cast<int>(i);
      }
      return best;
    };
    auto next_release_after = [&](double t) {
      double nr = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < members.size(); ++i)
        if (rem[i] > 1e-12 && jobs[members[i]].release > t + 1e-12)
          nr = std::min(nr, jobs[members[i]].release);
      return nr;
    };
    for (const auto& part : parts) {
      double t = part.first;
      while (t < part.second - 1e-12) {
        const int k = pick(t);
        if (k < 0) {
          const double nr = next_release_after(t);
          if (nr >= part.second) break;
          t = nr;
          continue;
        }
        const int j = members[k];
        double run = std::min(part.second - t, rem[k] / speed);
        const double nr = next_release_after(t);
        run = std::min(run, nr - t);
        if (run <= 1e-15) {
          rem[k] = 0.0;
          continue;
        }
        if (!work.empty() && work.back().job == j && work.back().speed == speed &&
            std::abs(work.back().end - t) <= 1e-12)
          work.back().end = t + run;
        else
          work.push_back({t, t + run, Mode::working, speed, j});
        if (t + run > jobs[j].deadline + 1e-6)
          throw std::logic_error("yds internal: job \"" + jobs[j].id +
                                 "\" packed past its deadline");
        rem[k] -= speed * run;
        t += run;
      }
    }
    for (std::size_t i = 0; i < members.size(); ++i)
      if (rem[i] > 1e-6 * (1.0 + jobs[members[i]].volume))
        throw std::logic_error("yds internal: job \"" + jobs[members[i]].id +
                               "\" not fully packed");
  };

  int left = n;
  while (left > 0) {
    std::vector<double> starts, ends;
    for (int i = 0; i < n; ++i)
      if (active[i]) {
        starts.push_back(jobs[i].release);
        ends.push_back(jobs[i].deadline);
      }
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());

    double best_density = -1.0, best_lo = 0.0, best_hi = 0.0;
    std::vector<int> best_members;
    for (double lo : starts) {
      const double clo = squeeze(lo);
      for (double hi : ends) {
        if (hi <= lo) continue;
        const double chi = squeeze(hi);
        const double len = chi - clo;
        if (len <= 1e-12) continue;
        double vol = 0.0;
        std::vector<int> members;
        for (int i = 0; i < n; ++i) {
          if (!active[i]) continue;
          if (squeeze(jobs[i].release) >= clo - 1e-12 &&
              squeeze(jobs[i].deadline) <= chi + 1e-12) {
            vol += jobs[i].volume;
            members.push_back(i);
          }
        }
        if (members.empty()) continue;
        const double density = vol / len;
        if (density > best_density * (1.0 + 1e-12) + 1e-15) {
          best_density = density;
          best_lo = lo;
          best_hi = hi;
          best_members = std::move(members);
        }
      }
    }
    if (best_members.empty())
      throw std::logic_error("yds internal: no candidate interval found");

    edf_pack(best_members, best_density, free_parts(best_lo, best_hi));
    block(best_lo, best_hi);
    for (int i : best_members) active[i] = 0;
    left -= static_cast<int>(best_members.size());
    out.densities.push_back(best_density);
  }

  std::sort(work.begin(), work.end(),
            [](const Segment& a, const Segment& b) { return a.start < b.start; });
  double cur = 0.0;
  for (const Segment& seg : work) {
    if (seg.start > cur + 1e-12)
      out.schedule.segments.push_back({cur, seg.start, Mode::idle, 0.0, -1});
    out.schedule.segments.push_back(seg);
    cur = seg.end;
  }
  if (cur < inst.horizon - 1e-12)
    out.schedule.segments.push_back({cur, inst.horizon, Mode::idle, 0.0, -1});
  return out;
}

inline Schedule yds(const Instance& inst) { return yds_detailed(inst).schedule; }

}  // namespace sqoa
