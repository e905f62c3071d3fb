#pragma once

#include <cstdint>
#include <vector>

#include "sqoa/brute_force.hpp"
#include "sqoa/instance.hpp"
#include "sqoa/power.hpp"
#include "sqoa/yds.hpp"

namespace sqoa {

// Canonical parameters of the verification corpus: alpha = 3, g = 2, L = 1,
// so the critical speed is exactly 1 and L/g = 0.5.
inline PowerParams corpus_params() { return make_power_params(3.0, 2.0, 1.0); }

// Deterministic micro-instances (1-3 jobs) for pairing with the brute-force
// reference: windows on a 0.05 time grid, job densities on quarter steps of
// the corpus critical speed, horizons short enough for an exact DP. Layouts
// rotate through stacked windows, sequential chains, nested windows and
// sleep-inducing gaps.
inline std::vector<Instance> tiny_corpus(int count = 50) {
  std::vector<Instance> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    detail::SplitRng rng(9000 + static_cast<std::uint64_t>(k));
    const int layout = k % 4;
    const int njobs = layout == 3 ? 1 + (k / 4) % 2 : 1 + k % 3;
    std::vector<Job> jobs;
    double cursor = 0.05 * rng.uniform_int(0, 3);
    double outer_hi = 0.0;
    for (int i = 0; i < njobs; ++i) {
      double len = 0.05 * rng.uniform_int(8, 16);               // 0.4 .. 0.8
      const double density = 0.25 * rng.uniform_int(2, 7);      // 0.5 .. 1.75
      double r = cursor;
      switch (layout) {
        case 0:  // stacked near the origin
          r = 0.05 * rng.uniform_int(0, 3);
          break;
        case 1:  // sequential chain with small slack
          r = cursor;
          cursor = r + len + 0.05 * rng.uniform_int(0, 2);
          break;
        case 2:  // nested: every next window inside the first
          if (i == 0) {
            len = 0.05 * rng.uniform_int(16, 24);  // 0.8 .. 1.2
            r = 0.0;
            outer_hi = len;
          } else {
            len = 0.05 * rng.uniform_int(4, 8);
            r = 0.05 * rng.uniform_int(1, std::max(1, static_cast<int>(outer_hi / 0.05) -
                                                          static_cast<int>(len / 0.05) - 1));
          }
          break;
        case 3:  // gap > L/g between jobs, forcing a sleep
          r = cursor;
          cursor = r + len + 0.05 * rng.uniform_int(14, 22);  // gap 0.7 .. 1.1
          break;
      }
      if (r + len > 2.4) len = std::max(0.2, 2.4 - r);  // keep the DP small
      jobs.push_back({"j" + std::to_string(i), detail::round6(r), detail::round6(r + len),
                      detail::round6(density * len)});
    }
    out.push_back(make_instance(std::move(jobs)));
  }
  return out;
}

// Speed quantum of the reference grid; tolerances of the structural checks
// are stated in multiples of it.
inline double corpus_speed_quantum(const PowerParams& p) { return critical_speed(p) / 8.0; }

// Grid used to pair a tiny instance with the brute-force reference: 0.05
// slots, eighth-s* speed steps, capped comfortably above both the peak YDS
// density and 2 s*.
inline BruteGrid tiny_corpus_grid(const Instance& inst, const PowerParams& p,
                                  double dt = 0.05) {
  const double s_star = critical_speed(p);
  double peak = s_star;
  if (!inst.jobs.empty()) peak = std::max(peak, yds_detailed(inst).densities.front());
  return make_grid(dt, corpus_speed_quantum(p), std::max(2.0 * s_star, 2.0 * peak));
}

}  // namespace sqoa
