#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sqoa {

// Processor state. "idle" means awake at speed zero, still paying static
// power; "sleep" consumes nothing but the next activation costs the wake-up
// energy.
enum class Mode { working, idle, sleep };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::working: return "working";
    case Mode::idle: return "idle";
    case Mode::sleep: return "sleep";
  }
  return "?";
}

// Malformed instance file (JSON or CSV).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A job was still unfinished at its deadline during simulation.
struct DeadlineMiss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No schedule on the requested discretization meets every deadline.
struct GridInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// |a - b| <= abs_tol + rel_tol * max(|a|, |b|)
inline bool near(double a, double b, double abs_tol = 1e-9, double rel_tol = 1e-9) {
  return std::abs(a - b) <= abs_tol + rel_tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace sqoa
