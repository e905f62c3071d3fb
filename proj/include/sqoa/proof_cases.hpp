#pragma once

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqoa/power.hpp"

namespace sqoa {
namespace proof {

// Scalar inequalities the amortized competitiveness argument reduces to, each
// normalized so the expression must be <= 0. Cases split on who is running
// (the online policy at speed s_a, the reference at s_o) and whether the top
// excess density g0 sits above or below the critical speed ("dense"/"sparse").
// x scales the relevant speed ratio, y = g0/s* where it appears.

// dense (g0 > s*), both running, online speed at the envelope floor q*g0;
// x = s_o/g0
inline double dense_floor(double alpha, double q, double beta, double c, double x) {
  return std::pow(q, alpha) - beta * alpha * q + beta * alpha * x + beta * (alpha - 1.0) -
         c * std::pow(x, alpha);
}

// same regime at the envelope cap q*(g0 + s_o)
inline double dense_cap(double alpha, double q, double beta, double c, double x) {
  return std::pow(q * (1.0 + x), alpha) - beta * alpha * q * (1.0 + x) + beta * alpha * x +
         beta * (alpha - 1.0) - c * std::pow(x, alpha);
}

// dense cap with beta = c = q^alpha * 2^(alpha-1) substituted and the positive
// slack dropped; parameter-free in q
inline double dense_cap_reduced(double alpha, double x) {
  const double p2 = std::pow(2.0, alpha - 1.0);
  return std::pow(1.0 + x, alpha) - alpha * p2 - p2 * std::pow(x, alpha);
}

// sparse (g0 < s*), both running, online at the floor speed s*; x = s_o/s*
inline double sparse_floor(double alpha, double beta, double c, double x) {
  return alpha - beta + beta * x - c * std::pow(x, alpha) - c * (alpha - 1.0);
}

// sparse cap q*(g0 + s_o); x = s_o/g0, y = g0/s* <= 1
inline double sparse_cap(double alpha, double q, double beta, double c, double x, double y) {
  return std::pow(q * y * (1.0 + x), alpha) - beta * q * (1.0 + x) * y + beta * x * y -
         c * std::pow(x * y, alpha) - (c - 1.0) * (alpha - 1.0);
}

// reference stopped (s_o = 0), dense; x = g0/s* >= 1, online at the floor q*g0
inline double stopped_dense_floor(double alpha, double q, double beta, double x) {
  return (std::pow(q, alpha) - beta * alpha * q + beta * (alpha - 1.0)) * std::pow(x, alpha) +
         (alpha - 1.0);
}

// same regime at the cap q*(g0 + s*)
inline double stopped_dense_cap(double alpha, double q, double beta, double x) {
  return std::pow(q * (1.0 + x), alpha) -
         beta * alpha * q * (1.0 + x) * std::pow(x, alpha - 1.0) +
         beta * (alpha - 1.0) * std::pow(x, alpha) + (alpha - 1.0);
}

// reference stopped, sparse, online at the floor s*: reduces to alpha <= beta
inline double stopped_sparse_floor(double alpha, double beta) { return alpha - beta; }

// reference stopped, sparse, online at the cap q*(g0 + s*); x = g0/s* <= 1
inline double stopped_sparse_cap(double alpha, double q, double beta, double x) {
  return std::pow(q * (1.0 + x), alpha) - beta * q * (1.0 + x) + (alpha - 1.0);
}

// online stopped (s_a = 0, hence g0 < s*); x = s_o/s*
inline double stopped_online(double alpha, double beta, double c, double x) {
  return beta * x - c * std::pow(x, alpha) - c * (alpha - 1.0);
}

}  // namespace proof

struct CaseCheck {
  std::string name;
  double max_value = -std::numeric_limits<double>::infinity();
  double at_alpha = 0.0, at_x = 0.0, at_y = 0.0;
  std::size_t points = 0;
};

struct CaseGrids {
  double alpha_min = 1.1, alpha_max = 5.0, alpha_step = 0.05;
  double x_min = 0.0, x_max = 10.0, x_step = 0.01;
  double y_min = 0.0, y_max = 1.0, y_step = 0.01;
  // Diagnostic hook scaling the shared constant beta = c; anything but 1
  // corrupts the analysis and must make the suite fail.
  double beta_scale = 1.0;
};

struct CaseReport {
  std::vector<CaseCheck> checks;
  double tolerance = 1e-9;

  double max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : checks) m = std::max(m, c.max_value);
    return m;
  }
  bool pass() const { return max_value() <= tolerance; }

  nlohmann::json to_json() const {
    nlohmann::json out;
    out["tolerance"] = tolerance;
    out["pass"] = pass();
    out["max_slack"] = max_value();
    out["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
      out["checks"].push_back({{"name", c.name},
                               {"max_slack", c.max_value},
                               {"alpha", c.at_alpha},
                               {"x", c.at_x},
                               {"y", c.at_y},
                               {"points", c.points}});
    return out;
  }

  void print(std::ostream& os) const {
    for (const auto& c : checks)
      os << (c.max_value <= tolerance ? "  ok   " : "  FAIL ") << std::left << std::setw(22)
         << c.name << " worst slack " << std::scientific << std::setprecision(3)
         << c.max_value << std::defaultfloat << "  (" << c.points << " points)\n";
  }
};

// Numeric audit of the competitive-ratio algebra: every reduced inequality is
// evaluated over the requested grids and the worst (largest) value reported.
// With the true constants every check stays <= 0 up to the tolerance.
inline CaseReport proof_case_suite(const CaseGrids& gr = {}) {
  CaseReport rep;
  rep.checks = {
      {"dense-floor"},        {"dense-cap"},         {"dense-cap-reduced"},
      {"sparse-floor"},       {"sparse-cap"},        {"stopped-dense-floor"},
      {"stopped-dense-cap"},  {"stopped-sparse-floor"}, {"stopped-sparse-cap"},
      {"online-stopped"},
  };
  auto& chk = rep.checks;
  auto note = [](CaseCheck& c, double v, double a, double x, double y) {
    ++c.points;
    if (v > c.max_value) {
      c.max_value = v;
      c.at_alpha = a;
      c.at_x = x;
      c.at_y = y;
    }
  };

  const int na = static_cast<int>(std::round((gr.alpha_max - gr.alpha_min) / gr.alpha_step));
  const int nx = static_cast<int>(std::round((gr.x_max - gr.x_min) / gr.x_step));
  const int ny = static_cast<int>(std::round((gr.y_max - gr.y_min) / gr.y_step));
  for (int ia = 0; ia <= na; ++ia) {
    const double alpha = gr.alpha_min + ia * gr.alpha_step;
    const double q = default_q(alpha);
    const double beta = gr.beta_scale * std::pow(q, alpha) * std::pow(2.0, alpha - 1.0);
    const double c = beta;

    note(chk[7], proof::stopped_sparse_floor(alpha, beta), alpha, 0, 0);
    for (int ix = 0; ix <= nx; ++ix) {
      const double x = gr.x_min + ix * gr.x_step;
      note(chk[0], proof::dense_floor(alpha, q, beta, c, x), alpha, x, 0);
      note(chk[1], proof::dense_cap(alpha, q, beta, c, x), alpha, x, 0);
      note(chk[2], proof::dense_cap_reduced(alpha, x), alpha, x, 0);
      note(chk[3], proof::sparse_floor(alpha, beta, c, x), alpha, x, 0);
      note(chk[9], proof::stopped_online(alpha, beta, c, x), alpha, x, 0);
      if (x >= 1.0) {
        note(chk[5], proof::stopped_dense_floor(alpha, q, beta, x), alpha, x, 0);
        note(chk[6], proof::stopped_dense_cap(alpha, q, beta, x), alpha, x, 0);
      }
      if (x <= 1.0) note(chk[8], proof::stopped_sparse_cap(alpha, q, beta, x), alpha, x, 0);
    }
    for (int iy = 0; iy <= ny; ++iy) {
      const double y = gr.y_min + iy * gr.y_step;
      for (int ix = 0; ix <= nx; ++ix) {
        const double x = gr.x_min + ix * gr.x_step;
        note(chk[4], proof::sparse_cap(alpha, q, beta, c, x, y), alpha, x, y);
      }
    }
  }
  return rep;
}

}  // namespace sqoa
