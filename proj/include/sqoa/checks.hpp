#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqoa/partition.hpp"
#include "sqoa/pending.hpp"
#include "sqoa/power.hpp"
#include "sqoa/replay.hpp"
#include "sqoa/schedule.hpp"
#include "sqoa/simulate.hpp"

namespace sqoa {

struct CheckViolation {
  double t = 0.0;
  std::string check;
  double lhs = 0.0, rhs = 0.0;
  std::string note;
};

struct CheckReport {
  std::string title;
  std::vector<CheckViolation> violations;
  std::size_t points = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();  // lhs - rhs, > 0 violates
  // Largest gap seen between the clamped and signed potential variants.
  double potential_divergence = 0.0;

  bool ok() const { return violations.empty(); }

  nlohmann::json to_json() const {
    nlohmann::json out;
    out["title"] = title;
    out["pass"] = ok();
    out["points"] = points;
    out["worst_margin"] = worst_margin;
    out["potential_divergence"] = potential_divergence;
    out["violations"] = nlohmann::json::array();
    for (const auto& v : violations)
      out["violations"].push_back(
          {{"t", v.t}, {"check", v.check}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"note", v.note}});
    return out;
  }

  void print(std::ostream& os) const {
    os << (ok() ? "  ok   " : "  FAIL ") << std::left << std::setw(22) << title
       << " worst margin " << std::scientific << std::setprecision(3) << worst_margin
       << std::defaultfloat << "  (" << points << " points, " << violations.size()
       << " violations)\n";
  }
};

namespace detail {
inline void record(CheckReport& rep, double t, const std::string& check, double lhs,
                   double rhs, const std::string& note = "") {
  ++rep.points;
  rep.worst_margin = std::max(rep.worst_margin, lhs - rhs);
  if (lhs > rhs) rep.violations.push_back({t, check, lhs, rhs, note});
}
}  // namespace detail

struct InvariantCheckConfig {
  double step = 1e-3;           // simulator step the trace was produced with
  double speed_quantum = 0.25;  // speed snap unit of the reference schedule
  double grid_dt = 0.05;        // slot length of the reference schedule
  double busy_slack_factor = 5.0;
  double floor_tol = 1e-6;
  double cap_tol = 0.0;  // <= 0: derived from q and the speed quantum
  double opt_tol = 0.0;  // <= 0: derived from the speed quantum
  int sample_stride = 1;
};

// After each wake/resume the processor must keep working until the deadline of
// the job it started with, up to an O(h) integration slack scaled by the
// window length. Needs only the event log, so it also runs on unsampled
// traces.
inline void check_busy_after_wake(const Instance& inst, const Trace& alg, double q,
                                  double step, double slack_factor, CheckReport& rep) {
  for (std::size_t k = 0; k < alg.events.size(); ++k) {
    const TraceEvent& ev = alg.events[k];
    if (ev.kind != EventKind::wake && ev.kind != EventKind::resume) continue;
    if (ev.job < 0) continue;
    const double d_first = inst.jobs[ev.job].deadline;
    const double slack = slack_factor * q * step * std::max(1.0, d_first - ev.t) + 1e-9;
    double first_stop = alg.end_time + slack;
    for (std::size_t m = k + 1; m < alg.events.size(); ++m) {
      const TraceEvent& later = alg.events[m];
      if (later.kind == EventKind::to_idle || later.kind == EventKind::to_sleep) {
        first_stop = later.t;
        break;
      }
    }
    detail::record(rep, ev.t, "busy-after-wake", d_first - slack, first_stop,
                   "first job " + inst.jobs[ev.job].id);
  }
}

// Structural checks of a sleep-managed trace against a reference schedule:
//  - busy-after-wake: once the processor wakes (or resumes from idle), it
//    keeps working until the deadline of the job it started with;
//  - speed-floor / speed-cap: whenever rho >= s*, the online speed lies in
//    [q*g0, q*g0 + q*max(s_o, s*)], g0 being the top excess density;
//  - opt-speed-support: the reference never runs slower than the highest
//    prefix density of its own pending work, and never idles while that
//    density is at or above s*.
// Tolerances default to the discretization scale of the two inputs.
inline CheckReport invariant_checks(const Instance& inst, const Trace& alg,
                                    const Schedule& opt, const PowerParams& p, double q,
                                    const InvariantCheckConfig& cfg = {}) {
  CheckReport rep;
  rep.title = "invariant-checks";
  const double s_star = critical_speed(p);
  const double cap_tol =
      cfg.cap_tol > 0.0 ? cfg.cap_tol : q * (2.0 * cfg.speed_quantum + 1e-3) + 1e-6;
  const double opt_tol = cfg.opt_tol > 0.0 ? cfg.opt_tol : 2.0 * cfg.speed_quantum + 1e-3;
  // The reference switches jobs only on slot boundaries, so a job whose true
  // service spans few slots is served at its exact-fit speed while denser
  // backlog waits; that pins the reference up to s'^2 * dt / w below the
  // pending density. The allowance vanishes as dt shrinks or volumes grow.
  auto exact_fit_slack = [&](double prefix_density, int job) {
    if (job < 0) return 0.0;
    return prefix_density * prefix_density * cfg.grid_dt / inst.jobs[job].volume;
  };

  check_busy_after_wake(inst, alg, q, cfg.step, cfg.busy_slack_factor, rep);

  // speed envelope along the trace
  TraceReplay alg_replay(inst, alg, p);
  ScheduleReplay opt_replay(inst, opt, p);
  for (std::size_t k = 0; k < alg.samples.size(); k += std::max(1, cfg.sample_stride)) {
    const TraceSample& s = alg.samples[k];
    if (s.mode != Mode::working || s.rho < s_star * (1.0 - 1e-9)) continue;
    const PendingWork opt_pending = opt_replay.pending_at(s.t);
    const auto part =
        critical_partition(alg_replay.pending_at(s.t), opt_pending, s.t, s_star);
    const double g0 = part.intervals.empty() ? 0.0 : part.intervals.front().density;
    const double s_o = opt_replay.speed_at(s.t);
    const double fit = exact_fit_slack(max_density(opt_pending, s.t).rho,
                                       opt_replay.job_at(s.t));
    detail::record(rep, s.t, "speed-floor", q * g0 - cfg.floor_tol, s.speed);
    detail::record(rep, s.t, "speed-cap", s.speed,
                   q * g0 + q * (s_o > 1e-12 ? s_o : s_star) + cap_tol + q * fit);
  }

  // reference speed dominates its own pending density; sampled per slot since
  // pending evolves inside merged segments
  for (const Segment& seg : opt.segments) {
    if (!(seg.end - seg.start > 0.0)) continue;
    for (double t = seg.start + 0.5 * cfg.grid_dt; t < seg.end; t += cfg.grid_dt) {
      const double so_prefix = max_density(opt_replay.pending_at(t), t).rho;
      if (seg.state == Mode::working)
        detail::record(rep, t, "opt-speed-support",
                       so_prefix - opt_tol - exact_fit_slack(so_prefix, seg.job), seg.speed);
      else
        detail::record(rep, t, "opt-stopped-support", so_prefix, s_star + opt_tol);
    }
  }
  return rep;
}

struct AmortizedConfig {
  int samples = 200;
  double grid_dt = 0.05;  // slot length of the reference schedule
  double step = 1e-3;     // simulator step of the trace
  double extra_slack = 1e-9;
  double arrival_tol = 1e-7;
  double end_tol = 1e-7;
};

// Verifies the integrated amortized invariant
//     E_alg_working(t) + phi(t) <= c * E_opt_working(t) + slack
// at sampled times, with slack covering one reference slot plus the
// integration error of the trace. Also asserts that phi does not jump across
// arrivals and vanishes at both ends of the run.
inline CheckReport amortized_check(const Instance& inst, const Trace& alg,
                                   const Schedule& opt, const PowerParams& p,
                                   const AnalysisConstants& consts,
                                   const AmortizedConfig& cfg = {}) {
  CheckReport rep;
  rep.title = "amortized-invariant";
  const double s_star = critical_speed(p);
  TraceReplay alg_replay(inst, alg, p);
  ScheduleReplay opt_replay(inst, opt, p);

  const double sa_max = alg_replay.max_speed();
  const double so_max = opt_replay.max_speed();
  const double slack = (std::pow(so_max, p.alpha) + p.static_power) * cfg.grid_dt +
                       2.0 * (std::pow(sa_max, p.alpha) + p.static_power) * cfg.step +
                       cfg.extra_slack;

  auto phi_at = [&](double t, bool include_arrivals) {
    const auto part = critical_partition(alg_replay.pending_at(t, include_arrivals),
                                         opt_replay.pending_at(t, include_arrivals), t, s_star);
    return potential(part, consts.beta, p.alpha);
  };

  detail::record(rep, 0.0, "phi-start", std::abs(phi_at(0.0, false).clamped), cfg.end_tol);
  for (int i = 0; i < cfg.samples; ++i) {
    const double t = alg.end_time * (i + 0.5) / cfg.samples;
    const PotentialValue phi = phi_at(t, true);
    rep.potential_divergence =
        std::max(rep.potential_divergence, std::abs(phi.clamped - phi.raw));
    const double lhs = alg_replay.working_energy_at(t) + phi.clamped;
    const double rhs = consts.c * opt_replay.working_energy_at(t) + slack;
    detail::record(rep, t, "amortized", lhs, rhs);
  }

  std::set<double> arrival_times;
  for (const TraceEvent& ev : alg.events)
    if (ev.kind == EventKind::arrival && ev.t > 0.0) arrival_times.insert(ev.t);
  for (double t : arrival_times) {
    const double before = phi_at(t, false).clamped;
    const double after = phi_at(t, true).clamped;
    detail::record(rep, t, "phi-arrival-jump", std::abs(after - before), cfg.arrival_tol);
  }

  detail::record(rep, alg.end_time, "phi-end", std::abs(phi_at(alg.end_time, true).clamped),
                 cfg.end_tol);
  return rep;
}

}  // namespace sqoa
