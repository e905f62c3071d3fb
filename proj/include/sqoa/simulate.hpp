#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sqoa/common.hpp"
#include "sqoa/instance.hpp"
#include "sqoa/pending.hpp"
#include "sqoa/policies.hpp"
#include "sqoa/power.hpp"
#include "sqoa/schedule.hpp"

namespace sqoa {

struct SimConfig {
  double max_step = 1e-3;      // integration step bound h
  double event_tol = 1e-9;     // bisection width when locating rule changes
  double deadline_tol = 1e-6;  // relative remaining work tolerated at a deadline
  int sample_stride = 1;
  bool record_samples = true;
};

enum class EventKind { arrival, completion, wake, resume, to_idle, to_sleep };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::arrival: return "arrival";
    case EventKind::completion: return "completion";
    case EventKind::wake: return "wake";
    case EventKind::resume: return "resume";
    case EventKind::to_idle: return "to_idle";
    case EventKind::to_sleep: return "to_sleep";
  }
  return "?";
}

struct TraceEvent {
  double t;
  EventKind kind;
  int job;  // -1 when not tied to a job
};

struct TraceSample {
  double t;
  Mode mode;
  double speed;
  double rho;
  int job;  // job in service, -1 if none
  double e_working, e_idle, e_wakeup;
};

// Time-stamped record of an online run. Samples are piecewise-constant:
// samples[k] describes [t_k, t_{k+1}).
struct Trace {
  std::vector<TraceSample> samples;
  std::vector<TraceEvent> events;
  double end_time = 0.0;
  int wake_count = 0;
  EnergyBreakdown energy;
  bool fully_sampled = false;  // every step recorded; required for replay
};

namespace detail {

class SimEngine {
 public:
  SimEngine(const Instance& inst, const Policy& pol, const PowerParams& p,
            const SimConfig& cfg)
      : inst_(inst),
        pol_(pol),
        p_(p),
        cfg_(cfg),
        q_(effective_q(pol, p)),
        s_star_(critical_speed(p)) {}

  Trace run() {
    n_ = static_cast<int>(inst_.jobs.size());
    rem_.assign(n_, 0.0);
    done_.assign(n_, false);
    for (int i = 0; i < n_; ++i) rem_[i] = inst_.jobs[i].volume;
    release_due();
    check_deadlines();

    const long cap =
        static_cast<long>(inst_.horizon / cfg_.max_step * 64.0) + 100000;
    long iter = 0;
    while (true) {
      settle_mode();
      if (pending_.empty() && next_release_ >= n_) break;
      if (mode_ == Mode::working)
        step_working();
      else if (!step_inactive())
        break;
      if (++iter > cap) throw std::runtime_error("simulate: step limit exceeded");
    }

    sample(0.0, -1, 0.0, true);
    trace_.end_time = t_;
    trace_.wake_count = wakes_;
    trace_.energy = {e_work_, e_idle_, e_wake_, e_dyn_, e_work_ + e_idle_ + e_wake_};
    trace_.fully_sampled = cfg_.record_samples && cfg_.sample_stride == 1;
    return std::move(trace_);
  }

 private:
  void emit(EventKind k, int job) { trace_.events.push_back({t_, k, job}); }

  void sample(double speed, int job, double rho, bool force) {
    if (!cfg_.record_samples) return;
    if (!force && cfg_.sample_stride > 1 && (stride_++ % cfg_.sample_stride) != 0) return;
    trace_.samples.push_back({t_, mode_, speed, rho, job, e_work_, e_idle_, e_wake_});
  }

  void release_due() {
    while (next_release_ < n_ && inst_.jobs[next_release_].release <= t_ + 1e-12) {
      emit(EventKind::arrival, next_release_);
      ++next_release_;
    }
  }

  void check_deadlines() {
    for (int i = 0; i < next_release_; ++i) {
      if (done_[i] || inst_.jobs[i].deadline > t_ + 1e-12) continue;
      const Job& j = inst_.jobs[i];
      if (rem_[i] <= cfg_.deadline_tol * (1.0 + j.volume)) {
        rem_[i] = 0.0;
        done_[i] = true;
        emit(EventKind::completion, i);
      } else {
        throw DeadlineMiss("policy " + std::string(to_string(pol_.kind)) + ": job \"" + j.id +
                           "\" missed deadline " + std::to_string(j.deadline) + " at t=" +
                           std::to_string(t_) + " with " + std::to_string(rem_[i]) +
                           " work remaining");
      }
    }
  }

  void rebuild_pending() {
    scratch_.clear();
    edf_ = -1;
    for (int i = 0; i < next_release_; ++i) {
      if (done_[i]) continue;
      scratch_.push_back({inst_.jobs[i].deadline, rem_[i]});
      if (edf_ < 0 || inst_.jobs[i].deadline < inst_.jobs[edf_].deadline ||
          (inst_.jobs[i].deadline == inst_.jobs[edf_].deadline &&
           inst_.jobs[i].id < inst_.jobs[edf_].id))
        edf_ = i;
    }
    pending_ = make_pending(scratch_);
  }

  // Applies transitions at the current instant until the mode is stable; a
  // resume condition beats a simultaneous sleep timeout.
  void settle_mode() {
    for (int guard = 0; guard < 6; ++guard) {
      rebuild_pending();
      const Mode before = mode_;
      if (manages_sleep(pol_.kind)) {
        const double rho = max_density(pending_, t_).rho;
        const Decision d = sqoa_decision({mode_, last_working_}, rho, p_, q_, t_);
        if (d.mode != mode_) {
          if (d.wake) {
            e_wake_ += p_.wake_energy;
            ++wakes_;
            emit(EventKind::wake, edf_);
          } else if (mode_ == Mode::idle && d.mode == Mode::working) {
            emit(EventKind::resume, edf_);
          } else if (d.mode == Mode::idle) {
            last_working_ = t_;
            emit(EventKind::to_idle, -1);
          } else if (d.mode == Mode::sleep) {
            emit(EventKind::to_sleep, -1);
          }
          mode_ = d.mode;
        }
      } else {
        // OA/AVR/qOA: work whenever something is pending, never sleep again
        if (mode_ != Mode::working && !pending_.empty()) {
          if (mode_ == Mode::sleep) {
            e_wake_ += p_.wake_energy;
            ++wakes_;
            emit(EventKind::wake, edf_);
          } else {
            emit(EventKind::resume, edf_);
          }
          mode_ = Mode::working;
        } else if (mode_ == Mode::working && pending_.empty()) {
          last_working_ = t_;
          emit(EventKind::to_idle, -1);
          mode_ = Mode::idle;
        }
      }
      if (mode_ == before) return;
    }
  }

  // Earliest future instant at which the highest pending density reaches s*.
  double wake_crossing() const {
    double best = std::numeric_limits<double>::infinity();
    double prefix = 0.0;
    for (const auto& it : pending_) {
      if (it.deadline <= t_) continue;
      prefix += it.remaining;
      const double tau = it.deadline - prefix / s_star_;
      if (tau <= t_) return t_;
      best = std::min(best, tau);
    }
    return best;
  }

  bool step_inactive() {
    double t_next = std::numeric_limits<double>::infinity();
    if (next_release_ < n_) t_next = std::min(t_next, inst_.jobs[next_release_].release);
    if (manages_sleep(pol_.kind)) {
      if (!pending_.empty()) t_next = std::min(t_next, wake_crossing());
      if (mode_ == Mode::idle)
        t_next = std::min(t_next, last_working_ + p_.wake_energy / p_.static_power);
    }
    if (!std::isfinite(t_next)) return false;
    t_next = std::max(t_next, t_);
    sample(0.0, -1, max_density(pending_, t_).rho, true);
    if (mode_ == Mode::idle) e_idle_ += p_.static_power * (t_next - t_);
    t_ = t_next;
    release_due();
    check_deadlines();
    return true;
  }

  // Next release or deadline of any job strictly after t (speed kinks for AVR,
  // feasibility checkpoints for everyone).
  double next_boundary() const {
    double b = std::numeric_limits<double>::infinity();
    if (next_release_ < n_) b = std::min(b, inst_.jobs[next_release_].release);
    for (int i = 0; i < n_; ++i)
      if (inst_.jobs[i].deadline > t_ + 1e-12) b = std::min(b, inst_.jobs[i].deadline);
    return b;
  }

  struct Sig {
    bool high;   // rho >= s* (up to the branch band)
    double t1;   // argmax deadline of the prefix density
  };

  // Signature after the EDF entry has been depleted by `depleted` work.
  Sig signature(double tau, double depleted) const {
    double prefix = 0.0;
    double rho = 0.0, t1 = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < pending_.size(); ++k) {
      const auto& it = pending_[k];
      if (it.deadline <= tau) continue;
      const double remaining =
          k == 0 ? std::max(0.0, it.remaining - depleted) : it.remaining;
      prefix += remaining;
      const double d = prefix / (it.deadline - tau);
      if (!any || d >= rho) {
        rho = d;
        t1 = it.deadline;
        any = true;
      }
    }
    return {rho >= s_star_ * (1.0 - policies_band()), t1};
  }

  static constexpr double policies_band() { return 1e-12; }

  double speed_after(double tau, double depleted) const {
    // rule speed with the EDF entry depleted; used for the materiality test
    PendingWork pw = pending_;
    if (!pw.empty()) pw[0].remaining = std::max(0.0, pw[0].remaining - depleted);
    if (!pw.empty() && !(pw[0].remaining > 0.0)) pw.erase(pw.begin());
    return policy_speed(pol_, inst_, pw, tau, p_);
  }

  void step_working() {
    const int e = edf_;
    const DensityPoint dp0 = max_density(pending_, t_);
    const double s0 = policy_speed(pol_, inst_, pending_, t_, p_);

    double t_end = t_ + cfg_.max_step;
    if (next_release_ < n_) t_end = std::min(t_end, inst_.jobs[next_release_].release);
    t_end = std::min(t_end, t_ + rem_[e] / s0);
    t_end = std::min(t_end, next_boundary());
    if (t_end <= t_) t_end = t_ + 1e-12 * (1.0 + t_);

    // Locate mid-step rule changes (rho crossing s*, argmax switches) by
    // bisection. Changes that do not move the speed are ignored, which keeps
    // boundary-pinned runs (e.g. q = 1 riding rho = s*) from chattering.
    bool clipped_by_rule = false;
    if (pol_.kind != PolicyKind::AVR && suppress_ == 0) {
      const Sig sig0 = signature(t_, 0.0);
      const double full = s0 * (t_end - t_);
      const Sig sig1 = signature(t_end, full);
      const bool branch_flip = sig0.high != sig1.high;
      const bool argmax_move = sig0.t1 != sig1.t1;
      const bool material =
          std::abs(speed_after(t_end, full) - s0) > 1e-9 * (1.0 + std::abs(s0));
      if ((branch_flip && material) || argmax_move) {
        double lo = t_, hi = t_end;
        while (hi - lo > cfg_.event_tol) {
          const double mid = 0.5 * (lo + hi);
          const Sig sm = signature(mid, s0 * (mid - t_));
          if (sm.high != sig0.high || sm.t1 != sig0.t1)
            hi = mid;
          else
            lo = mid;
        }
        const double cand = std::max(hi, t_ + cfg_.event_tol);
        if (cand < t_end) {
          t_end = cand;
          clipped_by_rule = true;
        }
      }
    }
    if (clipped_by_rule && (t_end - t_) < 0.02 * cfg_.max_step) {
      if (++tiny_streak_ >= 3) suppress_ = 2;  // chatter breaker
    } else {
      tiny_streak_ = 0;
      if (suppress_ > 0) --suppress_;
    }

    sample(s0, e, dp0.rho, false);
    const double dt = t_end - t_;
    rem_[e] = std::max(0.0, rem_[e] - s0 * dt);
    const double dyn = std::pow(s0, p_.alpha) * dt;
    e_dyn_ += dyn;
    e_work_ += dyn + p_.static_power * dt;
    t_ = t_end;
    last_working_ = t_;
    if (rem_[e] <= 1e-12 * (1.0 + inst_.jobs[e].volume)) {
      rem_[e] = 0.0;
      done_[e] = true;
      emit(EventKind::completion, e);
    }
    release_due();
    check_deadlines();
  }

  const Instance& inst_;
  const Policy pol_;
  const PowerParams p_;
  const SimConfig cfg_;
  const double q_;
  const double s_star_;

  int n_ = 0;
  double t_ = 0.0;
  Mode mode_ = Mode::sleep;
  double last_working_ = 0.0;
  int next_release_ = 0;
  std::vector<double> rem_;
  std::vector<char> done_;
  std::vector<PendingItem> scratch_;
  PendingWork pending_;
  int edf_ = -1;
  double e_work_ = 0.0, e_idle_ = 0.0, e_wake_ = 0.0, e_dyn_ = 0.0;
  int wakes_ = 0;
  long stride_ = 0;
  int tiny_streak_ = 0;
  int suppress_ = 0;
  Trace trace_;
};

}  // namespace detail

// Deterministic discrete-event run of one policy over one instance. Arrivals,
// completions and the idle timeout are hit exactly; rho-rule changes are
// located by bisection to the configured tolerance. Throws DeadlineMiss if a
// job cannot be finished in time.
inline Trace simulate(const Instance& inst, const Policy& pol, const PowerParams& p,
                      const SimConfig& cfg = {}) {
  return detail::SimEngine(inst, pol, p, cfg).run();
}

// CSV rows: t,mode,speed,rho,job_id,E_working,E_idle,E_wakeup
inline void write_trace_csv(const Trace& tr, const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "t,mode,speed,rho,job_id,E_working,E_idle,E_wakeup\n";
  out.precision(17);
  for (const TraceSample& s : tr.samples) {
    out << s.t << ',' << to_string(s.mode) << ',' << s.speed << ',' << s.rho << ',';
    if (s.job >= 0) out << inst.jobs[s.job].id;
    out << ',' << s.e_working << ',' << s.e_idle << ',' << s.e_wakeup << '\n';
  }
}

// CSV rows: t,event_kind,detail
inline void write_events_csv(const Trace& tr, const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write event file: " + path);
  out << "t,event_kind,detail\n";
  out.precision(17);
  for (const TraceEvent& e : tr.events) {
    out << e.t << ',' << to_string(e.kind) << ',';
    if (e.job >= 0) out << inst.jobs[e.job].id;
    out << '\n';
  }
}

}  // namespace sqoa
