// Command-line harness: instance generation, online-policy runs, ratio tables
// against offline references, and the verification suite.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sqoa/sqoa.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;   // verification or feasibility failure
constexpr int kExitUsage = 2;  // flag/file parse errors

struct ModelFlags {
  double alpha = 3.0;
  double g = 2.0;
  double L = 1.0;
  double q = 0.0;  // 0: default 2 - 1/alpha
  double step = 1e-3;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "power exponent (> 1)");
    cmd->add_option("--g", g, "static power while active (> 0)");
    cmd->add_option("--L", L, "wake-up energy (>= 0)");
    cmd->add_option("--q", q, "speed multiplier override for qOA/SqOA (>= 1)");
    cmd->add_option("--step", step, "simulator step bound h");
  }
  sqoa::PowerParams params() const { return sqoa::make_power_params(alpha, g, L, q); }
};

std::vector<double> parse_speeds(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    out.push_back(std::stod(cell));
  }
  return out;
}

sqoa::BruteGrid grid_for(const sqoa::Instance& inst, const sqoa::PowerParams& p, double dt,
                         const std::string& speeds_csv) {
  if (!speeds_csv.empty()) {
    sqoa::BruteGrid g;
    g.dt = dt;
    g.speeds = parse_speeds(speeds_csv);
    return g;
  }
  return sqoa::tiny_corpus_grid(inst, p, dt);
}

json summary_json(const sqoa::Trace& tr, const std::string& policy, const ModelFlags& mf,
                  bool feasible) {
  return json{{"policy", policy},
              {"alpha", mf.alpha},
              {"g", mf.g},
              {"L", mf.L},
              {"q", mf.q},
              {"step", mf.step},
              {"feasible", feasible},
              {"total", tr.energy.total},
              {"working", tr.energy.working},
              {"idle", tr.energy.idle},
              {"wakeup", tr.energy.wakeup},
              {"dynamic_only", tr.energy.dynamic_only},
              {"wake_count", tr.wake_count},
              {"end_time", tr.end_time}};
}

int cmd_gen(const std::string& kind, std::uint64_t seed, int size, const std::string& out,
            const sqoa::GenOptions& opt) {
  const sqoa::Instance inst = sqoa::generate(sqoa::gen_kind_from_string(kind), seed, size, opt);
  sqoa::write_instance(inst, out);
  std::cout << "wrote " << inst.jobs.size() << " job(s) to " << out << "\n";
  return kExitOk;
}

int cmd_run(const std::string& instance_path, const std::string& policy_name,
            const ModelFlags& mf, const std::string& out_dir) {
  const sqoa::Instance inst = sqoa::read_instance(instance_path);
  const sqoa::Policy pol{sqoa::policy_from_string(policy_name), mf.q};
  const sqoa::PowerParams p = mf.params();
  sqoa::SimConfig cfg;
  cfg.max_step = mf.step;

  fs::create_directories(out_dir);
  const std::string stem = fs::path(instance_path).stem().string();
  const std::string base = (fs::path(out_dir) / (stem + "-" + policy_name)).string();

  try {
    const sqoa::Trace tr = sqoa::simulate(inst, pol, p, cfg);
    sqoa::write_trace_csv(tr, inst, base + "-trace.csv");
    sqoa::write_events_csv(tr, inst, base + "-events.csv");
    std::ofstream(base + "-summary.json") << summary_json(tr, policy_name, mf, true).dump(2)
                                          << "\n";
    std::cout << policy_name << " on " << stem << ": total " << tr.energy.total << " (working "
              << tr.energy.working << ", idle " << tr.energy.idle << ", wakeup "
              << tr.energy.wakeup << "), " << tr.wake_count << " wake(s)\n";
    return kExitOk;
  } catch (const sqoa::DeadlineMiss& e) {
    std::ofstream(base + "-summary.json")
        << json{{"policy", policy_name}, {"feasible", false}, {"error", e.what()}}.dump(2)
        << "\n";
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitFail;
  }
}

int cmd_compare(const std::vector<std::string>& instance_paths,
                std::vector<std::string> policies, const ModelFlags& mf, double bf_dt,
                const std::string& bf_speeds, const std::string& out_dir, bool working_only) {
  if (policies.empty()) policies = {"oa", "avr", "qoa", "soa", "sqoa"};
  const sqoa::PowerParams p = mf.params();

  fs::create_directories(out_dir);
  std::ofstream table(fs::path(out_dir) / "ratios.csv");
  table << "instance,policy,total,denominator,lower_bound,ratio,ratio_lb,bound,flagged\n";
  table.precision(12);

  double worst_ratio = 0.0;
  std::string worst_label = "-";
  bool flagged_any = false;

  for (const std::string& path : instance_paths) {
    const sqoa::Instance inst = sqoa::read_instance(path);
    const std::string stem = fs::path(path).stem().string();
    const double lb = sqoa::opt_lower_bound(inst, p);

    double denom = 0.0, slot_slack = 0.0;
    bool have_bf = false;
    if (!inst.jobs.empty()) {
      try {
        const sqoa::BruteGrid grid = grid_for(inst, p, bf_dt, bf_speeds);
        const sqoa::BruteResult bf = sqoa::brute_force_opt(inst, p, grid);
        denom = working_only ? bf.energy.working : bf.energy.total;
        double s_max = 0.0;
        for (double s : grid.speeds) s_max = std::max(s_max, s);
        slot_slack = (std::pow(s_max, p.alpha) + p.static_power) * grid.dt;
        sqoa::write_schedule_csv(bf.schedule, inst,
                                 (fs::path(out_dir) / (stem + "-opt-schedule.csv")).string());
        have_bf = true;
      } catch (const sqoa::GridInfeasible& e) {
        std::cerr << "warning: " << stem << ": " << e.what()
                  << "; falling back to the lower bound\n";
      } catch (const std::exception& e) {
        std::cerr << "warning: " << stem << ": brute force failed (" << e.what()
                  << "); falling back to the lower bound\n";
      }
      if (!have_bf) denom = lb;
    }

    for (const std::string& name : policies) {
      const sqoa::Policy pol{sqoa::policy_from_string(name), mf.q};
      sqoa::SimConfig cfg;
      cfg.max_step = mf.step;
      cfg.record_samples = false;
      const sqoa::Trace tr = sqoa::simulate(inst, pol, p, cfg);
      const double num = working_only ? tr.energy.working : tr.energy.total;

      double ratio = 1.0, ratio_lb = 1.0;  // 0/0 convention for empty instances
      if (!inst.jobs.empty()) {
        ratio = denom > 0.0 ? num / denom : 0.0;
        ratio_lb = lb > 0.0 ? num / lb : 0.0;
      }

      double bound = 0.0;
      bool flagged = false;
      if (pol.kind == sqoa::PolicyKind::SqOA || pol.kind == sqoa::PolicyKind::SOA) {
        const sqoa::BoundKind bk = pol.kind == sqoa::PolicyKind::SqOA ? sqoa::BoundKind::SqOA
                                                                      : sqoa::BoundKind::SOA;
        bound = working_only ? sqoa::analysis_constants(p).c : sqoa::competitive_bound(p, bk);
        if (have_bf && denom > 0.0)
          flagged = ratio > bound + slot_slack / denom + 1e-6;
      }
      flagged_any |= flagged;

      table << stem << ',' << name << ',' << num << ',' << denom << ',' << lb << ',' << ratio
            << ',' << ratio_lb << ',' << (bound > 0.0 ? std::to_string(bound) : "") << ','
            << (flagged ? "yes" : "no") << "\n";
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst_label = name + " on " + stem;
      }
      if (inst.jobs.empty())
        std::cout << "note: " << stem << " is empty; ratios use the 0/0 = 1 convention\n";
    }
  }
  std::cout << "max ratio " << worst_ratio << " (" << worst_label << ")\n";
  if (flagged_any) {
    std::cerr << "FAIL: a sleep-managed policy exceeded its competitive bound\n";
    return kExitFail;
  }
  return kExitOk;
}

int cmd_verify(const ModelFlags& mf, double alpha_opt, int corpus_size, int samples,
               double bf_dt, bool skip_sim, double beta_scale, const std::string& out_path) {
  sqoa::CaseGrids grids;
  grids.beta_scale = beta_scale;
  if (alpha_opt > 0.0) {
    if (alpha_opt < grids.alpha_min)
      std::cerr << "warning: --alpha " << alpha_opt << " is below the default grid start "
                << grids.alpha_min << "; extending the grid\n";
    grids.alpha_min = std::min(grids.alpha_min, alpha_opt);
    grids.alpha_max = std::max(grids.alpha_max, alpha_opt);
  }

  std::cout << "case inequalities over alpha in [" << grids.alpha_min << ", " << grids.alpha_max
            << "]:\n";
  const sqoa::CaseReport cases = sqoa::proof_case_suite(grids);
  cases.print(std::cout);
  bool ok = cases.pass();

  json report;
  report["cases"] = cases.to_json();
  report["corpus"] = json::array();

  if (!skip_sim) {
    const sqoa::PowerParams p = sqoa::corpus_params();
    const auto corpus = sqoa::tiny_corpus(corpus_size);
    const sqoa::AnalysisConstants ac = sqoa::analysis_constants(p);
    std::cout << "corpus of " << corpus.size() << " micro-instances:\n";
    double worst_inv = -1e300, worst_amo = -1e300;
    int bad = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const sqoa::Instance& inst = corpus[i];
      sqoa::SimConfig cfg;
      cfg.max_step = mf.step;
      const sqoa::Trace tr = sqoa::simulate(inst, {sqoa::PolicyKind::SqOA}, p, cfg);
      const sqoa::BruteGrid grid = sqoa::tiny_corpus_grid(inst, p, bf_dt);
      const sqoa::BruteResult bf = sqoa::brute_force_opt(inst, p, grid);

      sqoa::InvariantCheckConfig icfg;
      icfg.step = cfg.max_step;
      icfg.speed_quantum = sqoa::corpus_speed_quantum(p);
      const sqoa::CheckReport inv = sqoa::invariant_checks(inst, tr, bf.schedule, p, p.q, icfg);

      sqoa::AmortizedConfig acfg;
      acfg.samples = samples;
      acfg.grid_dt = grid.dt;
      acfg.step = cfg.max_step;
      const sqoa::CheckReport amo = sqoa::amortized_check(inst, tr, bf.schedule, p, ac, acfg);

      report["corpus"].push_back(
          {{"index", i}, {"invariants", inv.to_json()}, {"amortized", amo.to_json()}});
      worst_inv = std::max(worst_inv, inv.worst_margin);
      worst_amo = std::max(worst_amo, amo.worst_margin);
      if (!inv.ok() || !amo.ok()) {
        ++bad;
        std::cout << "  instance " << i << ":\n";
        inv.print(std::cout);
        amo.print(std::cout);
      }
      ok = ok && inv.ok() && amo.ok();
    }
    std::cout << (bad == 0 ? "  ok   " : "  FAIL ") << "invariant + amortized checks ("
              << corpus.size() << " instances, worst margins " << worst_inv << ", " << worst_amo
              << ")\n";
  }

  if (!out_path.empty()) {
    std::ofstream(out_path) << report.dump(2) << "\n";
    std::cout << "report written to " << out_path << "\n";
  }
  std::cout << (ok ? "verify: PASS" : "verify: FAIL") << "\n";
  return ok ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speed scaling with a sleep state: online policies, offline references, "
               "and competitive-analysis verification"};
  app.require_subcommand(1);
  app.set_config("--config");

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  std::string gen_kind = "uniform_random", gen_out = "instance.json";
  std::uint64_t gen_seed = 1;
  int gen_size = 5;
  sqoa::GenOptions gen_opt;
  gen->add_option("--kind", gen_kind, "single|uniform_random|nested_adversarial|bursty_with_gaps")
      ->check(CLI::IsMember({"single", "uniform_random", "nested_adversarial",
                             "bursty_with_gaps"}));
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--size", gen_size, "number of jobs")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "output path (.json or .csv)");
  gen->add_option("--gen-g", gen_opt.static_power, "static power for the gap threshold");
  gen->add_option("--gen-L", gen_opt.wake_energy, "wake energy for the gap threshold");
  gen->add_option("--burst-size", gen_opt.burst_size, "jobs per burst");
  gen->add_option("--volume", gen_opt.volume, "volume of the single-job instance");
  gen->add_option("--window", gen_opt.deadline, "deadline of the single-job instance");

  // run
  auto* run = app.add_subcommand("run", "simulate one policy over one instance");
  std::string run_instance, run_policy = "sqoa", run_out = "out";
  ModelFlags run_mf;
  run->add_option("--instance", run_instance, "instance file")->required();
  run->add_option("--policy", run_policy, "oa|avr|qoa|soa|sqoa")
      ->check(CLI::IsMember({"oa", "avr", "qoa", "soa", "sqoa"}));
  run->add_option("--out", run_out, "output directory");
  run_mf.attach(run);

  // compare
  auto* cmp = app.add_subcommand("compare", "energy ratios against offline references");
  std::vector<std::string> cmp_instances, cmp_policies;
  std::string cmp_speeds, cmp_out = "out";
  double cmp_bf_dt = 0.05;
  bool cmp_working_only = false;
  ModelFlags cmp_mf;
  cmp->add_option("--instance", cmp_instances, "instance file (repeatable)")->required();
  cmp->add_option("--policy", cmp_policies, "policies to compare (default: all)");
  cmp->add_option("--bf-dt", cmp_bf_dt, "brute-force slot length");
  cmp->add_option("--bf-speeds", cmp_speeds, "comma-separated speed grid (default: auto)");
  cmp->add_option("--out", cmp_out, "output directory");
  cmp->add_flag("--working-only", cmp_working_only,
                "compare working energy against the constant c instead of totals");
  cmp_mf.attach(cmp);

  // verify
  auto* ver = app.add_subcommand("verify", "run the analysis verification suite");
  double ver_alpha = -1.0, ver_bf_dt = 0.05, ver_beta_scale = 1.0;
  int ver_corpus = 50, ver_samples = 200;
  bool ver_skip_sim = false;
  std::string ver_out;
  ModelFlags ver_mf;
  ver->add_option("--alpha", ver_alpha, "extra alpha to include in the case grids");
  ver->add_option("--corpus-size", ver_corpus, "number of micro-instances")
      ->check(CLI::PositiveNumber);
  ver->add_option("--samples", ver_samples, "amortized samples per instance")
      ->check(CLI::PositiveNumber);
  ver->add_option("--bf-dt", ver_bf_dt, "brute-force slot length");
  ver->add_option("--step", ver_mf.step, "simulator step bound h");
  ver->add_flag("--skip-sim", ver_skip_sim, "only run the case-inequality grids");
  ver->add_option("--out", ver_out, "write the JSON report here");
  ver->add_option("--beta-scale", ver_beta_scale, "")->group("");  // diagnostic hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_kind, gen_seed, gen_size, gen_out, gen_opt);
    if (run->parsed()) return cmd_run(run_instance, run_policy, run_mf, run_out);
    if (cmp->parsed())
      return cmd_compare(cmp_instances, cmp_policies, cmp_mf, cmp_bf_dt, cmp_speeds, cmp_out,
                         cmp_working_only);
    if (ver->parsed())
      return cmd_verify(ver_mf, ver_alpha, ver_corpus, ver_samples, ver_bf_dt, ver_skip_sim,
                        ver_beta_scale, ver_out);
  } catch (const sqoa::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
