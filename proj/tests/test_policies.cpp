#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sqoa/policies.hpp"
#include "sqoa/simulate.hpp"

using namespace sqoa;

namespace {

Instance inst_of(std::vector<Job> jobs) { return make_instance(std::move(jobs)); }

int count_events(const Trace& tr, EventKind k) {
  int n = 0;
  for (const auto& e : tr.events)
    if (e.kind == k) ++n;
  return n;
}

double event_time(const Trace& tr, EventKind k, int which = 0) {
  for (const auto& e : tr.events)
    if (e.kind == k && which-- == 0) return e.t;
  FAIL("event not found");
  return -1.0;
}

}  // namespace

TEST_CASE("max prefix density") {
  const PendingWork a = make_pending({{2.0, 4.0}, {4.0, 2.0}});
  const DensityPoint da = max_density(a, 0.0);
  CHECK(da.rho == Catch::Approx(2.0));
  CHECK(da.t1 == 2.0);

  CHECK_FALSE(max_density({}, 0.0).any);
  CHECK(max_density({}, 0.0).rho == 0.0);

  const PendingWork b = make_pending({{2.0, 2.0}, {4.0, 4.0}});
  const DensityPoint db = max_density(b, 0.0);
  CHECK(db.rho == Catch::Approx(1.5));
  CHECK(db.t1 == 4.0);

  // exact ties resolve to the latest deadline
  const DensityPoint dt = max_density(make_pending({{2.0, 2.0}, {4.0, 2.0}}), 0.0);
  CHECK(dt.rho == Catch::Approx(1.0));
  CHECK(dt.t1 == 4.0);
}

TEST_CASE("sqoa decision cases") {
  const PowerParams p = make_power_params(3.0, 2.0, 6.0);  // s* = 1, L/g = 3
  const double q = p.q;                                    // 5/3

  const Decision fast = sqoa_decision({Mode::working, 0.0}, 2.0, p, q, 1.0);
  CHECK(fast.mode == Mode::working);
  CHECK(fast.speed == Catch::Approx(10.0 / 3.0));

  const Decision slow = sqoa_decision({Mode::working, 0.0}, 0.5, p, q, 1.0);
  CHECK(slow.mode == Mode::working);
  CHECK(slow.speed == Catch::Approx(1.0));  // the critical speed

  const Decision drained = sqoa_decision({Mode::working, 0.0}, 0.0, p, q, 1.0);
  CHECK(drained.mode == Mode::idle);

  // idle with rho < s*: stays idle until exactly t' + L/g, then sleeps
  CHECK(sqoa_decision({Mode::idle, 2.0}, 0.5, p, q, 4.999).mode == Mode::idle);
  CHECK(sqoa_decision({Mode::idle, 2.0}, 0.5, p, q, 5.0).mode == Mode::sleep);

  const Decision resume = sqoa_decision({Mode::idle, 2.0}, 1.5, p, q, 4.0);
  CHECK(resume.mode == Mode::working);
  CHECK_FALSE(resume.wake);

  const Decision wake = sqoa_decision({Mode::sleep, 2.0}, 1.5, p, q, 9.0);
  CHECK(wake.mode == Mode::working);
  CHECK(wake.wake);
  CHECK(sqoa_decision({Mode::sleep, 2.0}, 0.5, p, q, 9.0).mode == Mode::sleep);
}

TEST_CASE("policy speeds") {
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);
  const Instance none = make_instance({});
  const PendingWork pending = make_pending({{2.0, 4.0}});
  CHECK(policy_speed({PolicyKind::OA}, none, pending, 0.0, p) == Catch::Approx(2.0));
  CHECK(policy_speed({PolicyKind::qOA, 1.5}, none, pending, 0.0, p) == Catch::Approx(3.0));

  const Instance avr_inst = inst_of({{"a", 0.0, 4.0, 4.0}, {"b", 0.0, 2.0, 1.0}});
  const PendingWork avr_pending = make_pending({{4.0, 3.0}, {2.0, 0.5}});
  CHECK(policy_speed({PolicyKind::AVR}, avr_inst, avr_pending, 1.0, p) == Catch::Approx(1.5));
  // after b's window closes only a's density counts
  CHECK(policy_speed({PolicyKind::AVR}, avr_inst, make_pending({{4.0, 1.0}}), 3.0, p) ==
        Catch::Approx(1.0));
}

TEST_CASE("SOA runs a single job at the critical speed") {
  const Instance inst = inst_of({{"j0", 0.0, 4.0, 4.0}});
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);
  const Trace tr = simulate(inst, {PolicyKind::SOA}, p);
  for (const auto& s : tr.samples)
    if (s.mode == Mode::working) CHECK(s.speed == Catch::Approx(1.0).margin(1e-9));
  CHECK(tr.energy.working == Catch::Approx(12.0).margin(1e-6));
  CHECK(tr.energy.wakeup == Catch::Approx(1.0));
  CHECK(tr.wake_count == 1);
  CHECK(tr.end_time == Catch::Approx(4.0).margin(1e-6));
}

TEST_CASE("SqOA wakes at the crossing and stays busy until the deadline") {
  const Instance inst = inst_of({{"j0", 0.0, 4.0, 4.0}});
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);  // q = 5/3
  const SimConfig cfg{1e-3};
  const Trace tr = simulate(inst, {PolicyKind::SqOA}, p, cfg);

  CHECK(event_time(tr, EventKind::wake) == Catch::Approx(0.0));  // rho = 1 = s* at release
  // initial burst at q*rho, then the critical speed
  CHECK(tr.samples.front().speed == Catch::Approx(5.0 / 3.0));
  // busy until the deadline up to the integration slack
  const double done = event_time(tr, EventKind::completion);
  CHECK(done > 4.0 - 10.0 * p.q * cfg.max_step * 4.0);
  CHECK(done <= 4.0 + 1e-9);
  CHECK(count_events(tr, EventKind::to_idle) == 1);  // only after finishing
  CHECK(tr.energy.total == Catch::Approx(13.0).margin(0.1));
}

TEST_CASE("SqOA sleeps after the idle timeout and wakes for the next job") {
  const Instance inst = inst_of({{"a", 0.0, 2.0, 2.0}, {"b", 12.0, 14.0, 2.0}});
  const PowerParams p = make_power_params(3.0, 2.0, 6.0);  // L/g = 3
  const Trace tr = simulate(inst, {PolicyKind::SqOA}, p);

  REQUIRE(count_events(tr, EventKind::to_sleep) == 1);
  const double idled = event_time(tr, EventKind::to_idle);
  CHECK(event_time(tr, EventKind::to_sleep) == Catch::Approx(idled + 3.0).margin(1e-9));
  CHECK(count_events(tr, EventKind::wake) == 2);
  CHECK(event_time(tr, EventKind::wake, 1) == Catch::Approx(12.0).margin(1e-9));
  CHECK(tr.energy.wakeup == Catch::Approx(12.0));
  CHECK(tr.energy.idle == Catch::Approx(6.0).margin(1e-6));  // g * (L/g) before sleeping
}

TEST_CASE("baselines pay idle power across gaps and never sleep") {
  const Instance inst = inst_of({{"a", 0.0, 2.0, 2.0}, {"b", 12.0, 14.0, 2.0}});
  const PowerParams p = make_power_params(3.0, 2.0, 6.0);
  const Trace tr = simulate(inst, {PolicyKind::OA}, p);
  CHECK(count_events(tr, EventKind::to_sleep) == 0);
  CHECK(tr.wake_count == 1);
  CHECK(tr.energy.idle == Catch::Approx(2.0 * 10.0).margin(1e-3));  // g * gap
}

TEST_CASE("SqOA at q = 1 follows the SOA rule pointwise") {
  const Instance inst = generate(GenKind::uniform_random, 21, 6);
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);
  const Trace tr = simulate(inst, {PolicyKind::SqOA, 1.0}, p);
  const double s_star = critical_speed(p);
  for (const auto& s : tr.samples)
    if (s.mode == Mode::working)
      CHECK(s.speed == Catch::Approx(std::max(s_star, s.rho)).margin(1e-9));
}

TEST_CASE("qOA at q = 1 matches OA exactly") {
  const Instance inst = generate(GenKind::uniform_random, 22, 6);
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);
  const Trace a = simulate(inst, {PolicyKind::qOA, 1.0}, p);
  const Trace b = simulate(inst, {PolicyKind::OA}, p);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].t == b.samples[i].t);
    CHECK(a.samples[i].speed == b.samples[i].speed);
  }
  CHECK(a.energy.total == Catch::Approx(b.energy.total));
}

TEST_CASE("qOA density follows the closed form within one prefix") {
  // single job, so rho(t) = rho0 * ((t1 - t)/t1)^(q-1) while working
  const Instance inst = inst_of({{"j0", 0.0, 4.0, 4.0}});
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);
  const double q = 1.5;
  const SimConfig cfg{1e-4};
  const Trace tr = simulate(inst, {PolicyKind::qOA, q}, p, cfg);
  for (const auto& s : tr.samples) {
    if (s.mode != Mode::working || s.t > 3.5) continue;
    const double expect = std::pow((4.0 - s.t) / 4.0, q - 1.0);
    CHECK(s.rho == Catch::Approx(expect).margin(2e-3));
  }
}

TEST_CASE("AVR serves at the summed window densities") {
  const Instance inst = inst_of({{"a", 0.0, 4.0, 4.0}, {"b", 0.0, 2.0, 1.0}});
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);
  const Trace tr = simulate(inst, {PolicyKind::AVR}, p);
  for (const auto& s : tr.samples) {
    if (s.mode != Mode::working) continue;
    if (s.t < 2.0 - 1e-9)
      CHECK(s.speed == Catch::Approx(1.5));
    else if (s.t > 2.0 && s.t < 4.0 - 1e-9)
      CHECK(s.speed == Catch::Approx(1.0));
  }
  CHECK(tr.end_time == Catch::Approx(4.0).margin(1e-6));
}

TEST_CASE("energy accounting identity") {
  const PowerParams p = make_power_params(3.0, 2.0, 1.5);
  for (std::uint64_t seed : {3, 4, 5}) {
    const Instance inst = generate(GenKind::uniform_random, seed, 5);
    for (PolicyKind kind : {PolicyKind::OA, PolicyKind::AVR, PolicyKind::qOA, PolicyKind::SOA,
                            PolicyKind::SqOA}) {
      const Trace tr = simulate(inst, {kind}, p);
      CHECK(tr.energy.total ==
            Catch::Approx(tr.energy.working + tr.energy.idle + tr.energy.wakeup));
      CHECK(tr.energy.wakeup == Catch::Approx(tr.wake_count * p.wake_energy));
      CHECK(tr.energy.dynamic_only <= tr.energy.working + 1e-9);
      // accumulators are non-decreasing along the trace
      for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        CHECK(tr.samples[i].e_working >= tr.samples[i - 1].e_working - 1e-12);
        CHECK(tr.samples[i].e_idle >= tr.samples[i - 1].e_idle - 1e-12);
        CHECK(tr.samples[i].e_wakeup >= tr.samples[i - 1].e_wakeup - 1e-12);
      }
    }
  }
}

TEST_CASE("every policy meets every deadline (smoke)") {
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst =
        generate(GenKind::uniform_random, seed, 1 + static_cast<int>(seed % 10));
    for (PolicyKind kind : {PolicyKind::OA, PolicyKind::AVR, PolicyKind::qOA, PolicyKind::SOA,
                            PolicyKind::SqOA}) {
      SimConfig cfg;
      cfg.record_samples = false;
      CHECK_NOTHROW(simulate(inst, {kind}, p, cfg));
    }
  }
}

TEST_CASE("halving the step changes the total at first order (smoke)") {
  const Instance inst = generate(GenKind::uniform_random, 17, 5);
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);
  double totals[3];
  int i = 0;
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    SimConfig cfg;
    cfg.max_step = h;
    cfg.record_samples = false;
    totals[i++] = simulate(inst, {PolicyKind::SqOA}, p, cfg).energy.total;
  }
  const double d1 = std::abs(totals[0] - totals[1]);
  const double d2 = std::abs(totals[1] - totals[2]);
  REQUIRE(d2 > 0.0);
  CHECK(d1 / d2 > 1.2);
  CHECK(d1 / d2 < 3.5);
}
