#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqoa/common.hpp"

namespace sqoa {

struct Job {
  std::string id;
  double release = 0.0;
  double deadline = 0.0;
  double volume = 0.0;
};

inline bool operator==(const Job& a, const Job& b) {
  return a.id == b.id && a.release == b.release && a.deadline == b.deadline &&
         a.volume == b.volume;
}

inline double job_density(const Job& j) { return j.volume / (j.deadline - j.release); }

struct Instance {
  std::vector<Job> jobs;  // sorted by (release, deadline, id)
  double horizon = 0.0;   // latest deadline, 0 when empty
};

inline bool operator==(const Instance& a, const Instance& b) {
  return a.jobs == b.jobs && a.horizon == b.horizon;
}

// Validates, sorts and computes the horizon.
inline Instance make_instance(std::vector<Job> jobs) {
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& j = jobs[i];
    auto fail = [&](const std::string& what) {
      throw ParseError("job \"" + j.id + "\" (record " + std::to_string(i) + "): " + what);
    };
    if (j.id.empty()) fail("empty id");
    if (!std::isfinite(j.release) || j.release < 0.0) fail("release must be finite and >= 0");
    if (!std::isfinite(j.deadline) || !(j.deadline > j.release))
      fail("deadline " + std::to_string(j.deadline) + " must exceed release " +
           std::to_string(j.release));
    if (!std::isfinite(j.volume) || !(j.volume > 0.0)) fail("volume must be > 0");
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    if (a.release != b.release) return a.release < b.release;
    if (a.deadline != b.deadline) return a.deadline < b.deadline;
    return a.id < b.id;
  });
  std::set<std::string> seen;
  double horizon = 0.0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!seen.insert(jobs[i].id).second)
      throw ParseError("job \"" + jobs[i].id + "\" (record " + std::to_string(i) +
                       "): duplicate id");
    horizon = std::max(horizon, jobs[i].deadline);
  }
  return Instance{std::move(jobs), horizon};
}

namespace detail {

// mt19937_64-backed uniforms. Raw-bit mapping keeps the stream identical
// across standard library implementations.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : eng_(seed) {}
  double next01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next01(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next01() * (hi - lo + 1)) % (hi - lo + 1);
  }

 private:
  std::mt19937_64 eng_;
};

inline double round6(double x) { return std::round(x * 1e6) / 1e6; }

}  // namespace detail

enum class GenKind { single, uniform_random, nested_adversarial, bursty_with_gaps };

inline const char* to_string(GenKind k) {
  switch (k) {
    case GenKind::single: return "single";
    case GenKind::uniform_random: return "uniform_random";
    case GenKind::nested_adversarial: return "nested_adversarial";
    case GenKind::bursty_with_gaps: return "bursty_with_gaps";
  }
  return "?";
}

inline GenKind gen_kind_from_string(const std::string& s) {
  if (s == "single") return GenKind::single;
  if (s == "uniform_random") return GenKind::uniform_random;
  if (s == "nested_adversarial") return GenKind::nested_adversarial;
  if (s == "bursty_with_gaps") return GenKind::bursty_with_gaps;
  throw std::invalid_argument("unknown instance kind: " + s);
}

struct GenOptions {
  // single
  double release = 0.0;
  double deadline = 4.0;
  double volume = 4.0;
  // uniform_random
  double release_span = 10.0;
  double window_min = 0.5, window_max = 5.0;
  double volume_min = 0.2, volume_max = 4.0;
  // nested_adversarial
  double outer_window = 8.0;
  double shrink = 0.6;  // window-length ratio between nesting levels
  double density_start = 0.5;
  double density_growth = 1.6;
  // bursty_with_gaps; static_power and wake_energy set the sleep threshold L/g
  double static_power = 2.0;
  double wake_energy = 6.0;
  int burst_size = 3;
  double burst_span = 1.5;
  double gap_factor_min = 1.2, gap_factor_max = 2.0;  // gap = factor * L/g
};

// Deterministic for fixed (kind, seed, size, options). Values are rounded to
// six decimals so file round-trips are bit-exact.
inline Instance generate(GenKind kind, std::uint64_t seed, int size,
                         const GenOptions& opt = {}) {
  using detail::round6;
  if (size < 1) throw std::invalid_argument("generate: size must be >= 1");
  detail::SplitRng rng(seed);
  std::vector<Job> jobs;
  auto id_of = [](int i) { return "j" + std::to_string(i); };

  switch (kind) {
    case GenKind::single: {
      jobs.push_back({id_of(0), round6(opt.release), round6(opt.deadline), round6(opt.volume)});
      break;
    }
    case GenKind::uniform_random: {
      for (int i = 0; i < size; ++i) {
        const double r = round6(rng.uniform(0.0, opt.release_span));
        const double len = round6(rng.uniform(opt.window_min, opt.window_max));
        const double w = round6(rng.uniform(opt.volume_min, opt.volume_max));
        jobs.push_back({id_of(i), r, round6(r + len), w});
      }
      break;
    }
    case GenKind::nested_adversarial: {
      double lo = 0.0;
      double len = opt.outer_window;
      double density = opt.density_start;
      for (int i = 0; i < size; ++i) {
        jobs.push_back({id_of(i), round6(lo), round6(lo + len), round6(density * len)});
        const double next_len = len * opt.shrink;
        if (next_len < 1e-3) break;  // nesting exhausted; emit fewer jobs
        lo = lo + rng.uniform(0.3, 0.7) * (len - next_len);
        len = next_len;
        density *= opt.density_growth;
      }
      break;
    }
    case GenKind::bursty_with_gaps: {
      const double threshold = opt.wake_energy / opt.static_power;  // L/g
      double burst_start = 0.0;
      int emitted = 0;
      while (emitted < size) {
        double burst_end = burst_start;
        const int in_burst = std::min(opt.burst_size, size - emitted);
        for (int k = 0; k < in_burst; ++k) {
          const double r = round6(burst_start + rng.uniform(0.0, 0.3 * opt.burst_span));
          const double len = round6(rng.uniform(0.4, 1.0) * opt.burst_span);
          const double w = round6(rng.uniform(0.3, 1.0) * len);
          jobs.push_back({id_of(emitted), r, round6(r + len), w});
          burst_end = std::max(burst_end, r + len);
          ++emitted;
        }
        const double gap =
            threshold * rng.uniform(opt.gap_factor_min, opt.gap_factor_max);
        burst_start = round6(burst_end + gap);
      }
      break;
    }
  }
  return make_instance(std::move(jobs));
}

// ---- file formats: JSON {"jobs":[{"id","r","d","w"},...]} and CSV id,r,d,w

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json out;
  out["jobs"] = nlohmann::json::array();
  for (const Job& j : inst.jobs)
    out["jobs"].push_back({{"id", j.id}, {"r", j.release}, {"d", j.deadline}, {"w", j.volume}});
  return out;
}

inline Instance instance_from_json(const nlohmann::json& in) {
  if (!in.is_object() || !in.contains("jobs") || !in["jobs"].is_array())
    throw ParseError("instance json: expected an object with a \"jobs\" array");
  std::vector<Job> jobs;
  int rec = 0;
  for (const auto& e : in["jobs"]) {
    auto fail = [&](const std::string& what) {
      throw ParseError("instance json (record " + std::to_string(rec) + "): " + what);
    };
    if (!e.is_object()) fail("job entry must be an object");
    for (const char* key : {"id", "r", "d", "w"})
      if (!e.contains(key)) fail(std::string("missing field \"") + key + "\"");
    if (!e["id"].is_string()) fail("\"id\" must be a string");
    if (!e["r"].is_number() || !e["d"].is_number() || !e["w"].is_number())
      fail("\"r\", \"d\", \"w\" must be numbers");
    jobs.push_back({e["id"].get<std::string>(), e["r"].get<double>(), e["d"].get<double>(),
                    e["w"].get<double>()});
    ++rec;
  }
  return make_instance(std::move(jobs));
}

inline Instance read_instance_csv(std::istream& in) {
  std::vector<Job> jobs;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("id", 0) == 0) continue;  // header
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 4)
      throw ParseError("instance csv line " + std::to_string(lineno) +
                       ": expected 4 fields id,r,d,w");
    auto num = [&](const std::string& s, const char* what) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw ParseError("instance csv line " + std::to_string(lineno) + ": bad " +
                         std::string(what) + " \"" + s + "\"");
      }
    };
    jobs.push_back({cells[0], num(cells[1], "release"), num(cells[2], "deadline"),
                    num(cells[3], "volume")});
  }
  return make_instance(std::move(jobs));
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  if (ends_with(path, ".csv")) return read_instance_csv(in);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("instance json " + path + ": " + e.what());
  }
  return instance_from_json(j);
}

inline void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  if (ends_with(path, ".csv")) {
    out << "id,r,d,w\n";
    out.precision(17);
    for (const Job& j : inst.jobs)
      out << j.id << ',' << j.release << ',' << j.deadline << ',' << j.volume << '\n';
  } else {
    out << instance_to_json(inst).dump(2) << '\n';
  }
}

}  // namespace sqoa
