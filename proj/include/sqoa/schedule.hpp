#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "sqoa/common.hpp"
#include "sqoa/instance.hpp"
#include "sqoa/power.hpp"

namespace sqoa {

struct Segment {
  double start = 0.0;
  double end = 0.0;
  Mode state = Mode::idle;
  double speed = 0.0;  // > 0 iff working
  int job = -1;        // index into Instance::jobs, -1 unless working
};

// Piecewise-constant plan; segments are ordered and non-overlapping.
struct Schedule {
  std::vector<Segment> segments;
  double horizon = 0.0;
};

enum class EnergyMode { dynamic_only, full_sleep_model };

struct EnergyBreakdown {
  double working = 0.0;       // (s^alpha + g) over working time
  double idle = 0.0;          // g over idle time
  double wakeup = 0.0;        // L per sleep -> active transition
  double dynamic_only = 0.0;  // s^alpha over working time
  double total = 0.0;
};

// The machine starts asleep, so the first active segment counts as a wake.
inline EnergyBreakdown schedule_energy(const Schedule& sch, const PowerParams& p,
                                       EnergyMode mode) {
  EnergyBreakdown e;
  Mode prev = Mode::sleep;
  int wakes = 0;
  for (const Segment& seg : sch.segments) {
    const double dt = seg.end - seg.start;
    if (!(dt > 0.0)) continue;
    if (seg.state == Mode::working) {
      const double dyn = std::pow(seg.speed, p.alpha) * dt;
      e.dynamic_only += dyn;
      e.working += dyn + p.static_power * dt;
    } else if (seg.state == Mode::idle) {
      e.idle += p.static_power * dt;
    }
    if (prev == Mode::sleep && seg.state != Mode::sleep) ++wakes;
    prev = seg.state;
  }
  if (mode == EnergyMode::dynamic_only) {
    e.working = e.dynamic_only;
    e.idle = 0.0;
    e.wakeup = 0.0;
    e.total = e.dynamic_only;
  } else {
    e.wakeup = wakes * p.wake_energy;
    e.total = e.working + e.idle + e.wakeup;
  }
  return e;
}

inline std::vector<double> delivered_work(const Schedule& sch, std::size_t njobs) {
  std::vector<double> w(njobs, 0.0);
  for (const Segment& seg : sch.segments)
    if (seg.state == Mode::working && seg.job >= 0 &&
        static_cast<std::size_t>(seg.job) < njobs)
      w[seg.job] += seg.speed * (seg.end - seg.start);
  return w;
}

// Every job gets at least its full volume, inside its window.
inline bool schedule_feasible(const Schedule& sch, const Instance& inst, double tol = 1e-6,
                              std::string* why = nullptr) {
  auto complain = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  for (const Segment& seg : sch.segments) {
    if (seg.state != Mode::working) continue;
    if (seg.job < 0 || static_cast<std::size_t>(seg.job) >= inst.jobs.size())
      return complain("working segment without a valid job");
    const Job& j = inst.jobs[seg.job];
    if (seg.start < j.release - tol || seg.end > j.deadline + tol)
      return complain("job \"" + j.id + "\" scheduled outside its window");
  }
  const auto got = delivered_work(sch, inst.jobs.size());
  for (std::size_t i = 0; i < inst.jobs.size(); ++i)
    if (got[i] < inst.jobs[i].volume - tol * (1.0 + inst.jobs[i].volume))
      return complain("job \"" + inst.jobs[i].id + "\" short by " +
                      std::to_string(inst.jobs[i].volume - got[i]));
  return true;
}

// CSV rows: start,end,state,speed,job_id
inline void write_schedule_csv(const Schedule& sch, const Instance& inst,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write schedule file: " + path);
  out << "start,end,state,speed,job_id\n";
  out.precision(17);
  for (const Segment& seg : sch.segments) {
    out << seg.start << ',' << seg.end << ',' << to_string(seg.state) << ',' << seg.speed
        << ',';
    if (seg.state == Mode::working && seg.job >= 0) out << inst.jobs[seg.job].id;
    out << '\n';
  }
}

}  // namespace sqoa
