#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sqoa/instance.hpp"
#include "sqoa/power.hpp"
#include "sqoa/schedule.hpp"
#include "sqoa/yds.hpp"

namespace sqoa {

struct BruteGrid {
  double dt = 0.5;
  std::vector<double> speeds;  // should contain 0 and the critical speed
  std::size_t state_budget = 500'000'000;  // transition cap, a few seconds of work
};

// Uniform grid: multiples of quantum from 0 up to at least cap.
inline BruteGrid make_grid(double dt, double quantum, double cap) {
  BruteGrid g;
  g.dt = dt;
  const int k = std::max(1, static_cast<int>(std::ceil(cap / quantum - 1e-9)));
  for (int i = 0; i <= k; ++i) g.speeds.push_back(i * quantum);
  return g;
}

struct BruteResult {
  Schedule schedule;
  EnergyBreakdown energy;
  double work_unit = 0.0;   // volume quantum of the dynamic program
  double speed_unit = 0.0;  // positive grid speeds are snapped to multiples of this
};

// Exact dynamic program over time slots of length dt. Per slot the machine
// sleeps, idles, or works on the EDF-pending job at a grid speed; waking from
// sleep (including the initial one) costs L. Positive speeds are snapped to
// multiples of the smallest positive grid speed so work and energy bookkeeping
// stay exact; releases round up and deadlines round down to slot boundaries
// and job volumes round up to the work unit, so the result is a feasible
// schedule and its energy upper-bounds the continuous optimum.
inline BruteResult brute_force_opt(const Instance& inst, const PowerParams& p,
                                   const BruteGrid& grid) {
  if (!(grid.dt > 0.0)) throw std::invalid_argument("brute_force_opt: dt must be > 0");
  double s_min = std::numeric_limits<double>::infinity();
  for (double s : grid.speeds)
    if (s > 0.0) s_min = std::min(s_min, s);
  if (!std::isfinite(s_min))
    throw std::invalid_argument("brute_force_opt: need at least one positive speed");

  BruteResult out;
  out.work_unit = grid.dt * s_min;
  out.speed_unit = s_min;
  const int n = static_cast<int>(inst.jobs.size());
  if (n == 0) return out;
  if (n > 5) throw std::invalid_argument("brute_force_opt: at most 5 jobs");

  // snap speeds to unit counts
  std::vector<int> punits;
  for (double s : grid.speeds) {
    if (s <= 0.0) continue;
    punits.push_back(std::max(1, static_cast<int>(std::lround(s / s_min))));
  }
  std::sort(punits.begin(), punits.end());
  punits.erase(std::unique(punits.begin(), punits.end()), punits.end());

  const double dt = grid.dt;
  const double u = out.work_unit;
  const int slots = static_cast<int>(std::ceil(inst.horizon / dt - 1e-9));

  std::vector<int> units(n), rel_slot(n), dl_slot(n);
  for (int i = 0; i < n; ++i) {
    const Job& j = inst.jobs[i];
    units[i] = static_cast<int>(std::ceil(j.volume / u - 1e-9));
    rel_slot[i] = static_cast<int>(std::ceil(j.release / dt - 1e-9));
    dl_slot[i] = static_cast<int>(std::floor(j.deadline / dt + 1e-9));
    if (units[i] >= 4096)
      throw std::invalid_argument("brute_force_opt: work grid too fine for job \"" + j.id +
                                  "\"");
    if (units[i] > 0 && rel_slot[i] >= dl_slot[i])
      throw GridInfeasible("job \"" + j.id + "\": window shorter than one slot");
    if (units[i] > static_cast<long>(dl_slot[i] - rel_slot[i]) * punits.back())
      throw GridInfeasible("job \"" + j.id + "\": top grid speed too slow");
  }

  // EDF order: by (deadline, id); jobs of the instance are sorted by release.
  std::vector<int> edf_order(n);
  for (int i = 0; i < n; ++i) edf_order[i] = i;
  std::sort(edf_order.begin(), edf_order.end(), [&](int a, int b) {
    if (inst.jobs[a].deadline != inst.jobs[b].deadline)
      return inst.jobs[a].deadline < inst.jobs[b].deadline;
    return inst.jobs[a].id < inst.jobs[b].id;
  });

  // state key: 12 bits of remaining units per job, awake flag on top
  auto key_of = [&](const std::vector<int>& rem, bool awake) {
    std::uint64_t k = awake ? 1 : 0;
    for (int i = 0; i < n; ++i) k = (k << 12) | static_cast<std::uint64_t>(rem[i]);
    return k;
  };
  auto rem_of = [&](std::uint64_t key, std::vector<int>& rem, bool& awake) {
    for (int i = n - 1; i >= 0; --i) {
      rem[i] = static_cast<int>(key & 0xfff);
      key >>= 12;
    }
    awake = key & 1;
  };

  struct Entry {
    double cost;
    std::int64_t delay;  // integral of remaining work; breaks cost ties
    std::uint64_t prev;
    int action;  // -2 sleep, -1 idle, >=0 index into punits
  };
  using Layer = std::unordered_map<std::uint64_t, Entry>;
  std::vector<Layer> layers(slots + 1);

  std::vector<int> rem0(units);
  layers[0].reserve(4);
  layers[0][key_of(rem0, false)] = {0.0, 0, 0, -2};

  const double idle_cost = p.static_power * dt;
  std::vector<double> work_cost(punits.size());
  for (std::size_t k = 0; k < punits.size(); ++k)
    work_cost[k] = (std::pow(punits[k] * s_min, p.alpha) + p.static_power) * dt;

  std::size_t touched = 0;
  std::vector<int> rem(n), rem2(n);
  for (int slot = 0; slot < slots; ++slot) {
    Layer& cur = layers[slot];
    Layer& nxt = layers[slot + 1];
    nxt.reserve(cur.size() * 2);
    for (const auto& [key, entry] : cur) {
      bool awake = false;
      rem_of(key, rem, awake);
      bool dead = false;
      for (int i = 0; i < n; ++i)
        if (rem[i] > 0 && dl_slot[i] <= slot) dead = true;
      if (dead) continue;

      // Ties in cost (permutations of the same slot actions) resolve toward
      // the schedule that drains work earliest, so the reference inherits the
      // eager structure of the continuous optimum.
      auto push = [&](std::uint64_t nkey, double cost, std::int64_t left, int action) {
        const std::int64_t delay = entry.delay + left;
        auto it = nxt.find(nkey);
        if (it == nxt.end() || cost < it->second.cost - 1e-10 ||
            (cost <= it->second.cost + 1e-10 && delay < it->second.delay))
          nxt[nkey] = {cost, delay, key, action};
      };

      std::int64_t left_now = 0;
      for (int i = 0; i < n; ++i) left_now += rem[i];

      // sleep (free; entering it from the active state is also free)
      push(key_of(rem, false), entry.cost, left_now, -2);
      // idle keeps the machine awake; waking straight into idle is never useful
      if (awake) push(key_of(rem, true), entry.cost + idle_cost, left_now, -1);
      // work on the EDF-pending job
      int e = -1;
      for (int cand : edf_order)
        if (rem[cand] > 0 && rel_slot[cand] <= slot) {
          e = cand;
          break;
        }
      if (e >= 0) {
        const double wake = awake ? 0.0 : p.wake_energy;
        for (std::size_t k = 0; k < punits.size(); ++k) {
          rem2 = rem;
          rem2[e] = std::max(0, rem[e] - punits[k]);
          push(key_of(rem2, true), entry.cost + wake + work_cost[k],
               left_now - (rem[e] - rem2[e]), static_cast<int>(k));
        }
      }
      touched += punits.size() + 2;
      if (touched > grid.state_budget)
        throw std::runtime_error("brute_force_opt: state budget exceeded; coarsen the grid");
    }
  }

  // best final state: everything finished
  std::uint64_t best_key = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& [key, entry] : layers[slots]) {
    bool awake = false;
    rem_of(key, rem, awake);
    bool done = true;
    for (int i = 0; i < n; ++i)
      if (rem[i] > 0) done = false;
    if (done && entry.cost < best_cost) {
      best_cost = entry.cost;
      best_key = key;
    }
  }
  if (!std::isfinite(best_cost))
    throw GridInfeasible("no grid schedule meets all deadlines; enlarge the speed set");

  // backtrack actions, then replay forward to attach EDF jobs
  std::vector<int> actions(slots);
  std::uint64_t key = best_key;
  for (int slot = slots; slot > 0; --slot) {
    const Entry& e = layers[slot].at(key);
    actions[slot - 1] = e.action;
    key = e.prev;
  }

  rem = units;
  Schedule& sch = out.schedule;
  sch.horizon = inst.horizon;
  for (int slot = 0; slot < slots; ++slot) {
    const double a = slot * dt, b = (slot + 1) * dt;
    Mode state;
    double speed = 0.0;
    int job = -1;
    if (actions[slot] == -2) {
      state = Mode::sleep;
    } else if (actions[slot] == -1) {
      state = Mode::idle;
    } else {
      state = Mode::working;
      speed = punits[actions[slot]] * s_min;
      for (int cand : edf_order)
        if (rem[cand] > 0 && rel_slot[cand] <= slot) {
          job = cand;
          break;
        }
      rem[job] = std::max(0, rem[job] - punits[actions[slot]]);
    }
    if (!sch.segments.empty() && sch.segments.back().state == state &&
        sch.segments.back().speed == speed && sch.segments.back().job == job)
      sch.segments.back().end = b;
    else
      sch.segments.push_back({a, b, state, speed, job});
  }
  out.energy = schedule_energy(sch, p, EnergyMode::full_sleep_model);
  return out;
}

// max{ total volume * P(s*)/s*, dynamic energy of the YDS schedule }. Both
// terms lower-bound any feasible schedule's total energy; the first wake is
// left out so the bound holds under either initial-state convention.
inline double opt_lower_bound(const Instance& inst, const PowerParams& p) {
  if (inst.jobs.empty()) return 0.0;
  double volume = 0.0;
  for (const Job& j : inst.jobs) volume += j.volume;
  const double per_work = energy_per_work(p, critical_speed(p));
  const double yds_dyn = schedule_energy(yds(inst), p, EnergyMode::dynamic_only).total;
  return std::max(volume * per_work, yds_dyn);
}

}  // namespace sqoa
