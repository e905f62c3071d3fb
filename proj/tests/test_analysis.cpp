#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sqoa/brute_force.hpp"
#include "sqoa/checks.hpp"
#include "sqoa/corpus.hpp"
#include "sqoa/partition.hpp"
#include "sqoa/proof_cases.hpp"
#include "sqoa/simulate.hpp"

using namespace sqoa;

namespace {

Instance inst_of(std::vector<Job> jobs) { return make_instance(std::move(jobs)); }

}  // namespace

TEST_CASE("excess work clamps at zero") {
  const PendingWork alg = make_pending({{2.0, 4.0}});
  const PendingWork opt = make_pending({{2.0, 1.0}});
  CHECK(excess_work(alg, alg, 0.0, 2.0) == 0.0);
  CHECK(excess_work(alg, opt, 0.0, 2.0) == Catch::Approx(3.0));
  CHECK(excess_work(opt, alg, 0.0, 2.0) == 0.0);
}

TEST_CASE("critical partition construction") {
  // two online deadlines, nothing pending for the reference
  const PendingWork alg = make_pending({{2.0, 4.0}, {4.0, 2.0}});
  const CriticalPartition part = critical_partition(alg, {}, 0.0, 1.0);
  REQUIRE(part.intervals.size() == 2);
  CHECK(part.intervals[0].t_lo == 0.0);
  CHECK(part.intervals[0].t_hi == 2.0);
  CHECK(part.intervals[0].density == Catch::Approx(2.0));
  CHECK(part.intervals[1].t_hi == 4.0);
  CHECK(part.intervals[1].density == Catch::Approx(1.0));

  // equal pendings collapse to one zero-density interval
  const CriticalPartition flat = critical_partition(alg, alg, 0.0, 1.0);
  REQUIRE(flat.intervals.size() == 1);
  CHECK(flat.intervals[0].density == 0.0);
  CHECK(flat.end() == 4.0);

  const CriticalPartition one =
      critical_partition(make_pending({{4.0, 4.0}}), make_pending({{4.0, 2.0}}), 0.0, 1.0);
  REQUIRE(one.intervals.size() == 1);
  CHECK(one.intervals[0].density == Catch::Approx(0.5));
}

TEST_CASE("critical partition densities decrease strictly") {
  detail::SplitRng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<PendingItem> a, o;
    const int na = rng.uniform_int(1, 5), no = rng.uniform_int(0, 4);
    for (int i = 0; i < na; ++i)
      a.push_back({0.25 * rng.uniform_int(1, 32), 0.25 * rng.uniform_int(1, 12)});
    for (int i = 0; i < no; ++i)
      o.push_back({0.25 * rng.uniform_int(1, 32), 0.25 * rng.uniform_int(1, 12)});
    const CriticalPartition part =
        critical_partition(make_pending(a), make_pending(o), 0.0, 1.0);
    REQUIRE(!part.intervals.empty());
    double latest = 0.0;
    for (const auto& it : make_pending(a)) latest = std::max(latest, it.deadline);
    for (const auto& it : make_pending(o)) latest = std::max(latest, it.deadline);
    CHECK(part.end() == latest);
    for (std::size_t i = 1; i < part.intervals.size(); ++i) {
      CHECK(part.intervals[i].density < part.intervals[i - 1].density + 1e-12);
      CHECK(part.intervals[i].t_lo == part.intervals[i - 1].t_hi);
    }
  }
}

TEST_CASE("potential values") {
  // w_alg == w_opt everywhere -> phi vanishes
  const PendingWork same = make_pending({{2.0, 1.0}, {3.0, 2.0}});
  const CriticalPartition flat = critical_partition(same, same, 0.0, 1.0);
  CHECK(potential(flat, 4.5, 2.0).clamped == 0.0);

  // hand-built single interval: ghat = 2, excess 3, beta 4.5, alpha 2
  CriticalPartition manual;
  manual.t0 = 0.0;
  manual.intervals.push_back({0.0, 1.0, 2.0, 2.0, 3.0, 0.0, 3.0});
  CHECK(potential(manual, 4.5, 2.0).clamped == Catch::Approx(27.0));

  // composed with the partition of the (0,2,4)/(4,2) example at s* = 1
  const PendingWork alg = make_pending({{2.0, 4.0}, {4.0, 2.0}});
  const CriticalPartition part = critical_partition(alg, {}, 0.0, 1.0);
  const PotentialValue v = potential(part, 4.5, 2.0);
  CHECK(v.clamped == Catch::Approx(45.0));
  CHECK(v.raw == Catch::Approx(45.0));  // all intervals have positive excess
}

TEST_CASE("proof case spot values") {
  // alpha = 2: q = 1.5, beta = c = 4.5
  CHECK(proof::dense_cap_reduced(2.0, 1.0) == Catch::Approx(-2.0));
  CHECK(proof::dense_cap(2.0, 1.5, 4.5, 4.5, 1.0) == Catch::Approx(-9.0));
  // the online-stopped form scaled by c: c*(x - x^alpha - (alpha-1)) at x = 1
  CHECK(proof::stopped_online(2.0, 4.5, 4.5, 1.0) == Catch::Approx(-4.5));
  for (double alpha : {1.5, 2.0, 3.0, 4.0}) {
    const double c = std::pow(default_q(alpha), alpha) * std::pow(2.0, alpha - 1.0);
    CHECK(proof::stopped_online(alpha, c, c, 1.0) ==
          Catch::Approx(-c * (alpha - 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("proof case suite passes on a thinned grid") {
  CaseGrids gr;
  gr.alpha_step = 0.13;
  gr.x_step = 0.05;
  gr.y_step = 0.05;
  const CaseReport rep = proof_case_suite(gr);
  INFO("max slack " << rep.max_value());
  CHECK(rep.pass());
  for (const auto& c : rep.checks) CHECK(c.points > 0);
}

TEST_CASE("corrupting the analysis constant trips the suite") {
  CaseGrids gr;
  gr.alpha_step = 0.13;
  gr.x_step = 0.05;
  gr.y_step = 0.05;
  gr.beta_scale = 0.5;
  CHECK_FALSE(proof_case_suite(gr).pass());
}

TEST_CASE("amortized invariant on the single-job pair") {
  const Instance inst = inst_of({{"j0", 0.0, 4.0, 4.0}});
  const PowerParams p = make_power_params(3.0, 2.0, 1.0);
  const SimConfig cfg{1e-3};
  const Trace tr = simulate(inst, {PolicyKind::SqOA}, p, cfg);
  BruteGrid grid;
  grid.dt = 0.05;
  grid.speeds = {0.0, 0.5, 1.0, 1.5, 2.0};
  const BruteResult opt = brute_force_opt(inst, p, grid);

  AmortizedConfig acfg;
  acfg.grid_dt = grid.dt;
  acfg.step = cfg.max_step;
  const CheckReport rep =
      amortized_check(inst, tr, opt.schedule, p, analysis_constants(p), acfg);
  INFO("worst margin " << rep.worst_margin);
  CHECK(rep.ok());
}

TEST_CASE("potential is continuous across arrivals and events") {
  const Instance inst = inst_of({{"a", 0.0, 2.0, 1.0}, {"b", 0.5, 1.5, 0.5}});
  const PowerParams p = corpus_params();
  const Trace tr = simulate(inst, {PolicyKind::SqOA}, p);
  const BruteResult opt = brute_force_opt(inst, p, tiny_corpus_grid(inst, p));

  TraceReplay alg_replay(inst, tr, p);
  ScheduleReplay opt_replay(inst, opt.schedule, p);
  const double s_star = critical_speed(p);
  const AnalysisConstants ac = analysis_constants(p);

  auto phi = [&](double t) {
    return potential(critical_partition(alg_replay.pending_at(t), opt_replay.pending_at(t), t,
                                        s_star),
                     ac.beta, p.alpha)
        .clamped;
  };

  // dense sweep: wherever the partition size changes, phi must move by O(dt)
  const double dt = 1e-3;
  double prev_phi = phi(0.0);
  std::size_t prev_h =
      critical_partition(alg_replay.pending_at(0.0), opt_replay.pending_at(0.0), 0.0, s_star)
          .intervals.size();
  double max_jump_at_change = 0.0;
  for (double t = dt; t <= tr.end_time; t += dt) {
    const double cur_phi = phi(t);
    const std::size_t cur_h =
        critical_partition(alg_replay.pending_at(t), opt_replay.pending_at(t), t, s_star)
            .intervals.size();
    if (cur_h != prev_h)
      max_jump_at_change = std::max(max_jump_at_change, std::abs(cur_phi - prev_phi));
    prev_phi = cur_phi;
    prev_h = cur_h;
  }
  // slope bound: beta * ghat^(alpha-1) * (s_a + s_o), generously rounded up
  const double lip = ac.beta * std::pow(2.0 * s_star, p.alpha - 1.0) *
                     (alg_replay.max_speed() + opt_replay.max_speed() + 1.0) * 4.0;
  CHECK(max_jump_at_change <= lip * dt + 1e-9);

  CHECK(phi(0.0) >= 0.0);
  CHECK(phi(tr.end_time) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("invariant checks pass on a brute-force pair") {
  const PowerParams p = corpus_params();
  for (int k : {0, 1, 2, 3}) {
    const Instance inst = tiny_corpus(8)[k];
    const Trace tr = simulate(inst, {PolicyKind::SqOA}, p);
    const BruteGrid grid = tiny_corpus_grid(inst, p);
    const BruteResult opt = brute_force_opt(inst, p, grid);
    InvariantCheckConfig cfg;
    cfg.step = 1e-3;
    cfg.speed_quantum = corpus_speed_quantum(p);
    const CheckReport rep = invariant_checks(inst, tr, opt.schedule, p, p.q, cfg);
    INFO("instance " << k << " worst margin " << rep.worst_margin);
    CHECK(rep.ok());
  }
}

TEST_CASE("invariant checks pass for the q = 1 run on the single job") {
  const Instance inst = inst_of({{"j0", 0.0, 4.0, 4.0}});
  const PowerParams p = corpus_params();
  const Trace tr = simulate(inst, {PolicyKind::SqOA, 1.0}, p);
  BruteGrid grid;
  grid.dt = 0.05;
  grid.speeds = {0.0, 0.5, 1.0, 1.5, 2.0};
  const BruteResult opt = brute_force_opt(inst, p, grid);
  InvariantCheckConfig cfg;
  cfg.step = 1e-3;
  cfg.speed_quantum = 0.5;
  const CheckReport rep = invariant_checks(inst, tr, opt.schedule, p, 1.0, cfg);
  INFO("worst margin " << rep.worst_margin);
  CHECK(rep.ok());
}

TEST_CASE("speed floor is implied by the density bound") {
  // g0 can never exceed rho, so q*g0 <= q*rho = s_a whenever rho >= s*
  detail::SplitRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PendingItem> a, o;
    for (int i = 0, n = rng.uniform_int(1, 4); i < n; ++i)
      a.push_back({rng.uniform(0.5, 8.0), rng.uniform(0.1, 3.0)});
    for (int i = 0, n = rng.uniform_int(0, 4); i < n; ++i)
      o.push_back({rng.uniform(0.5, 8.0), rng.uniform(0.1, 3.0)});
    const PendingWork alg = make_pending(a), opt = make_pending(o);
    const double rho = max_density(alg, 0.0).rho;
    const CriticalPartition part = critical_partition(alg, opt, 0.0, 1.0);
    const double g0 = part.intervals.empty() ? 0.0 : part.intervals.front().density;
    CHECK(g0 <= rho + 1e-12);
  }
}
