#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sqoa/instance.hpp"
#include "sqoa/pending.hpp"
#include "sqoa/power.hpp"
#include "sqoa/schedule.hpp"
#include "sqoa/simulate.hpp"

namespace sqoa {

// Reconstructs remaining work and accumulated working energy at arbitrary
// times from a fully sampled trace.
class TraceReplay {
 public:
  TraceReplay(const Instance& inst, const Trace& tr, const PowerParams& p)
      : inst_(&inst), tr_(&tr), p_(p) {
    if (!tr.fully_sampled)
      throw std::invalid_argument("TraceReplay: trace must be fully sampled (stride 1)");
    // cumulative delivered work per job at each sample time
    const std::size_t n = inst.jobs.size();
    const std::size_t m = tr.samples.size();
    delivered_.assign(m, std::vector<double>(n, 0.0));
    for (std::size_t k = 1; k < m; ++k) {
      delivered_[k] = delivered_[k - 1];
      const TraceSample& s = tr.samples[k - 1];
      const double dt = tr.samples[k].t - s.t;
      if (s.mode == Mode::working && s.job >= 0 && dt > 0.0)
        delivered_[k][s.job] += s.speed * dt;
    }
  }

  // Index of the last sample with t_k <= t.
  std::size_t index_at(double t) const {
    const auto& ss = tr_->samples;
    auto it = std::upper_bound(ss.begin(), ss.end(), t,
                               [](double v, const TraceSample& s) { return v < s.t; });
    if (it == ss.begin()) return 0;
    return static_cast<std::size_t>(it - ss.begin()) - 1;
  }

  double remaining(int job, double t) const {
    const std::size_t k = index_at(t);
    const TraceSample& s = tr_->samples[k];
    double got = delivered_[k][job];
    if (s.mode == Mode::working && s.job == job && t > s.t) got += s.speed * (t - s.t);
    return std::max(0.0, inst_->jobs[job].volume - got);
  }

  // Released, unfinished work at t; arrivals exactly at t are included unless
  // asked otherwise (used to probe the potential across an arrival).
  PendingWork pending_at(double t, bool include_arrivals_at = true) const {
    std::vector<PendingItem> items;
    for (std::size_t i = 0; i < inst_->jobs.size(); ++i) {
      const Job& j = inst_->jobs[i];
      const bool released = include_arrivals_at ? j.release <= t : j.release < t;
      if (!released) continue;
      const double rem = remaining(static_cast<int>(i), t);
      if (rem > 1e-9 * (1.0 + j.volume)) items.push_back({j.deadline, rem});
    }
    return make_pending(std::move(items));
  }

  double working_energy_at(double t) const {
    const std::size_t k = index_at(t);
    const TraceSample& s = tr_->samples[k];
    double e = s.e_working;
    if (s.mode == Mode::working && t > s.t)
      e += (std::pow(s.speed, p_.alpha) + p_.static_power) * (t - s.t);
    return e;
  }

  double speed_at(double t) const {
    const TraceSample& s = tr_->samples[index_at(t)];
    return s.mode == Mode::working ? s.speed : 0.0;
  }

  double max_speed() const {
    double m = 0.0;
    for (const auto& s : tr_->samples) m = std::max(m, s.speed);
    return m;
  }

 private:
  const Instance* inst_;
  const Trace* tr_;
  PowerParams p_;
  std::vector<std::vector<double>> delivered_;
};

// Same queries over a piecewise-constant offline schedule.
class ScheduleReplay {
 public:
  ScheduleReplay(const Instance& inst, const Schedule& sch, const PowerParams& p)
      : inst_(&inst), sch_(&sch), p_(p) {
    energy_prefix_.assign(sch.segments.size() + 1, 0.0);
    for (std::size_t k = 0; k < sch.segments.size(); ++k) {
      const Segment& seg = sch.segments[k];
      double de = 0.0;
      if (seg.state == Mode::working)
        de = (std::pow(seg.speed, p.alpha) + p.static_power) * (seg.end - seg.start);
      energy_prefix_[k + 1] = energy_prefix_[k] + de;
    }
  }

  double remaining(int job, double t) const {
    double got = 0.0;
    for (const Segment& seg : sch_->segments) {
      if (seg.state != Mode::working || seg.job != job) continue;
      if (seg.start >= t) break;
      got += seg.speed * (std::min(t, seg.end) - seg.start);
    }
    return std::max(0.0, inst_->jobs[job].volume - got);
  }

  PendingWork pending_at(double t, bool include_arrivals_at = true) const {
    std::vector<PendingItem> items;
    for (std::size_t i = 0; i < inst_->jobs.size(); ++i) {
      const Job& j = inst_->jobs[i];
      const bool released = include_arrivals_at ? j.release <= t : j.release < t;
      if (!released) continue;
      const double rem = remaining(static_cast<int>(i), t);
      if (rem > 1e-9 * (1.0 + j.volume)) items.push_back({j.deadline, rem});
    }
    return make_pending(std::move(items));
  }

  double working_energy_at(double t) const {
    double e = 0.0;
    for (std::size_t k = 0; k < sch_->segments.size(); ++k) {
      const Segment& seg = sch_->segments[k];
      if (seg.start >= t) break;
      if (seg.end <= t) {
        e = energy_prefix_[k + 1];
      } else if (seg.state == Mode::working) {
        e = energy_prefix_[k] +
            (std::pow(seg.speed, p_.alpha) + p_.static_power) * (t - seg.start);
      } else {
        e = energy_prefix_[k];
      }
    }
    return e;
  }

  // Speed of the segment containing t (segments are half-open on the right).
  double speed_at(double t) const {
    for (const Segment& seg : sch_->segments)
      if (seg.start <= t && t < seg.end)
        return seg.state == Mode::working ? seg.speed : 0.0;
    return 0.0;
  }

  // Job in service at t, -1 when not working.
  int job_at(double t) const {
    for (const Segment& seg : sch_->segments)
      if (seg.start <= t && t < seg.end)
        return seg.state == Mode::working ? seg.job : -1;
    return -1;
  }

  double max_speed() const {
    double m = 0.0;
    for (const auto& seg : sch_->segments)
      if (seg.state == Mode::working) m = std::max(m, seg.speed);
    return m;
  }

 private:
  const Instance* inst_;
  const Schedule* sch_;
  PowerParams p_;
  std::vector<double> energy_prefix_;
};

}  // namespace sqoa
