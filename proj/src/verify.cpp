#include "bomber/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "bomber/model.hpp"
#include "bomber/quadrature.hpp"

#include "json.hpp"

namespace bomber::verify {

namespace {

// Deterministic sampler for the battery.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace

ResidualReport residual_check(const std::function<double(const State&)>& P_fn,
                              const State& s, const ModelParams& params,
                              const QuadratureConfig& quad) {
  const double lhs = P_fn(s);
  double rhs = 1.0;
  if (s.t > 0.0) {
    auto integrand = [&](double sv) {
      auto slice = [&](double z) { return P_fn(State(z, sv)); };
      return std::exp(sv) * solver::inner_max(s.x, slice, params).value;
    };
    const QuadratureResult q = integrate(integrand, 0.0, s.t, quad);
    rhs = std::exp(-s.t) * (1.0 + q.value);
  }
  return {s, lhs, rhs, std::abs(lhs - rhs)};
}

BoundaryEstimate boundary_detect(const solver::SolutionGrid& grid, double t,
                                 double tol) {
  const solver::GridSpec& spec = grid.spec();
  if (!(t > 0.0 && t <= spec.t_max))
    throw std::domain_error("boundary_detect: t outside grid range");
  // Snap to the nearest time column; the analytic boundary still uses the
  // requested t.
  int j = static_cast<int>(std::lround(t / spec.dt()));
  j = std::clamp(j, 0, spec.nt - 1);

  auto spends_all = [&](int i) {
    return grid.x_node(i) - grid.kstar_at(i, j) <= tol;
  };

  double x_detected = 0.0;
  if (spends_all(spec.nx - 1)) {
    x_detected = grid.x_node(spec.nx - 1);
  } else if (spends_all(0)) {
    // Bisect the last spend-all index; the spend-it-all set is the
    // interval [0, f_u(t)].
    int lo = 0, hi = spec.nx - 1;
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      (spends_all(mid) ? lo : hi) = mid;
    }
    x_detected = grid.x_node(lo);
  }
  const double x_analytic = model::boundary_f(t, grid.params());
  return {t, x_detected, x_analytic, std::abs(x_detected - x_analytic)};
}

DerivativeReport check_interior_derivative_positive(
    double x, double s, const ModelParams& params, int n_samples,
    const QuadratureConfig& quad, double h_scale) {
  if (!(s > 0.0))
    throw std::domain_error("check_interior_derivative_positive: s must be > 0");
  const double len = x - model::boundary_f(s, params);
  if (!(len > 0.0))
    return {true, true, std::numeric_limits<double>::infinity(), 0};

  auto G2 = [&](double y) {
    return model::survival_kernel(y, params) *
           model::q2(x - y, s, params, quad);
  };

  const int n = std::max(2, n_samples);
  double min_est = std::numeric_limits<double>::infinity();
  for (int m = 0; m < n; ++m) {
    const double y = len * m / (n - 1);
    double h = 1e-5 * std::max(1.0, std::abs(y)) * h_scale;
    h = std::min(h, 0.25 * len);
    double est;
    if (y - h >= 0.0 && y + h <= len) {
      est = (G2(y + h) - G2(y - h)) / (2.0 * h);
    } else if (y + 2.0 * h <= len) {
      est = (-3.0 * G2(y) + 4.0 * G2(y + h) - G2(y + 2.0 * h)) / (2.0 * h);
    } else {
      est = (3.0 * G2(y) - 4.0 * G2(y - h) + G2(y - 2.0 * h)) / (2.0 * h);
    }
    min_est = std::min(min_est, est);
  }
  return {min_est > -1e-8, false, min_est, n};
}

MonotonicityReport check_monotone_K_in_x(
    const ModelParams& params, std::span<const double> t_samples,
    std::span<const double> x_samples, const solver::SolutionGrid* grid) {
  std::vector<double> xs(x_samples.begin(), x_samples.end());
  std::sort(xs.begin(), xs.end());

  double min_inc = std::numeric_limits<double>::infinity();
  for (double t : t_samples) {
    const double f = model::boundary_f(t, params);
    double prev = -std::numeric_limits<double>::infinity();
    bool have_prev = false;
    for (double x : xs) {
      if (!(x > 0.0 && x <= 2.0 * f)) continue;  // R1 u R2 only
      const double k = model::closed_form_K(State(x, t), params);
      if (have_prev) min_inc = std::min(min_inc, k - prev);
      prev = k;
      have_prev = true;
    }
  }

  double numeric_min = std::numeric_limits<double>::infinity();
  bool scanned = false;
  if (grid != nullptr) {
    const solver::GridSpec& spec = grid->spec();
    for (double t : t_samples) {
      if (!(t > 0.0 && t <= spec.t_max)) continue;
      const int j = std::clamp(
          static_cast<int>(std::lround(t / spec.dt())), 0, spec.nt - 1);
      for (int i = 1; i < spec.nx; ++i)
        numeric_min = std::min(
            numeric_min, grid->kstar_at(i, j) - grid->kstar_at(i - 1, j));
      scanned = true;
    }
  }
  return {min_inc >= 0.0, min_inc, numeric_min, scanned};
}

double check_u_zero_limit(UBranchOp op,
                          std::span<const std::array<double, 3>> inputs,
                          double eps, const QuadratureConfig& quad) {
  if (!(eps > 0.0 && eps <= 1e-6))
    throw std::domain_error("check_u_zero_limit: eps must be in (0, 1e-6]");
  const ModelParams pe(eps);
  const ModelParams p0(0.0);

  auto eval = [&](const ModelParams& p, const std::array<double, 3>& in) {
    switch (op) {
      case UBranchOp::BoundaryF:
        return model::boundary_f(in[0], p);
      case UBranchOp::BoundaryFInverse:
        return model::boundary_f_inverse(in[0], p);
      case UBranchOp::ClosedFormP:
        return model::closed_form_P(State(in[0], in[1]), p, quad);
      case UBranchOp::G1:
        return model::g1(in[0], in[1], in[2], p);
      case UBranchOp::QIntegrand:
        return model::q_integrand(in[0], in[1], p);
      case UBranchOp::Q2:
        return model::q2(in[0], in[1], p, quad);
    }
    throw std::logic_error("check_u_zero_limit: unknown op");
  };

  double dev = 0.0;
  for (const auto& in : inputs)
    dev = std::max(dev, std::abs(eval(pe, in) - eval(p0, in)));
  return dev;
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  for (const CheckResult& c : checks) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": observed "
        << c.observed << " vs threshold " << c.threshold;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
  }
  out << (all_passed() ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
  return out.str();
}

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  j["all_passed"] = all_passed();
  j["checks"] = nlohmann::json::array();
  for (const CheckResult& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"observed", c.observed},
                           {"threshold", c.threshold},
                           {"detail", c.detail}});
  return j.dump(2);
}

namespace {

State sample_r1r2_state(SplitMix64& rng, const ModelParams& params,
                        double t_lo, double t_hi) {
  const double t = rng.uniform(t_lo, t_hi);
  const double f = model::boundary_f(t, params);
  const double x = rng.uniform(0.02, 1.0) * 2.0 * f;
  return State(x, t);
}

}  // namespace

VerificationReport run_battery(const ModelParams& params, bool quick,
                               uint64_t seed) {
  VerificationReport report;
  SplitMix64 rng(seed);
  QuadratureConfig quad;
  QuadratureConfig outer_quad;
  outer_quad.max_subdivisions = 400;

  auto add = [&](const std::string& name, bool passed, double observed,
                 double threshold, const std::string& detail = "") {
    report.checks.push_back({name, passed, observed, threshold, detail});
  };

  // 1. Fixed-point residual of the closed form on random R1 u R2 states.
  {
    const int n = quick ? 15 : 100;
    auto closed = [&](const State& s) {
      return model::closed_form_P(s, params, quad);
    };
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const State s = sample_r1r2_state(rng, params, 0.15, 4.0);
      worst = std::max(
          worst, residual_check(closed, s, params, outer_quad).residual);
    }
    add("closed_form_residual", worst <= 1e-6, worst, 1e-6,
        std::to_string(n) + " random R1/R2 states");
  }

  // 2-3. Solve a grid; compare against the closed form and detect the
  // spend-it-all boundary.
  {
    solver::GridSpec spec;
    if (quick) {
      spec.x_max = spec.t_max = 2.5;
      spec.nx = spec.nt = 501;
    }
    const double dx = spec.dx();
    const solver::SolutionGrid grid =
        solver::solve_integral_equation(params, spec);

    double p_err = 0.0, k_err = 0.0;
    for (int j = 1; j < spec.nt; ++j) {
      const double t = grid.t_node(j);
      const double f2 = 2.0 * model::boundary_f(t, params);
      for (int i = 0; i < spec.nx; ++i) {
        const double x = grid.x_node(i);
        if (x > f2) break;
        const State s(x, t);
        p_err = std::max(p_err, std::abs(std::exp(-t) * grid.pbar_at(i, j) -
                                         model::closed_form_P(s, params, quad)));
        k_err = std::max(k_err, std::abs(grid.kstar_at(i, j) -
                                         model::closed_form_K(s, params)));
      }
    }
    add("solver_vs_closed_form_P", p_err <= 1e-4, p_err, 1e-4,
        "max |numeric - closed| on R1/R2 grid nodes");
    add("solver_vs_closed_form_K", k_err <= 2.0 * dx, k_err, 2.0 * dx);

    double worst_gap = 0.0;
    for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      if (t > spec.t_max) continue;
      worst_gap =
          std::max(worst_gap, boundary_detect(grid, t, 0.5 * dx).gap);
    }
    add("boundary_gap", worst_gap <= 2.0 * dx, worst_gap, 2.0 * dx,
        "spend-it-all boundary vs f_u(t)");
  }

  // 4. Interior derivative positivity on random R2 states.
  {
    const int n_states = quick ? 10 : 50;
    const int n_samples = quick ? 20 : 50;
    double min_est = std::numeric_limits<double>::infinity();
    bool pass = true;
    for (int i = 0; i < n_states; ++i) {
      const double t = rng.uniform(0.3, 4.0);
      const double f = model::boundary_f(t, params);
      const double x = f * rng.uniform(1.001, 2.0);
      const double s_lo = model::boundary_f_inverse(x, params);
      const double s = s_lo + rng.uniform(0.0, 1.0) * (t - s_lo);
      const DerivativeReport r = check_interior_derivative_positive(
          x, std::max(s, s_lo * (1 + 1e-12)), params, n_samples, quad);
      pass = pass && r.pass;
      if (!r.vacuous) min_est = std::min(min_est, r.min_estimate);
    }
    add("interior_derivative_positive", pass, min_est, -1e-8,
        std::to_string(n_states) + " R2 states");
  }

  // 5. u -> 0 limits at eps = 1e-8 for every u-branched operation.
  {
    const int n = quick ? 20 : 100;
    const double eps = 1e-8;
    const ModelParams pe(eps);
    const ModelParams p0(0.0);
    double worst = 0.0;
    std::vector<std::array<double, 3>> in;

    auto run = [&](UBranchOp op) {
      worst = std::max(worst, check_u_zero_limit(op, in, eps, quad));
      in.clear();
    };

    for (int i = 0; i < n; ++i) in.push_back({rng.uniform(0.1, 10.0), 0, 0});
    run(UBranchOp::BoundaryF);
    for (int i = 0; i < n; ++i) in.push_back({rng.uniform(0.05, 5.0), 0, 0});
    run(UBranchOp::BoundaryFInverse);
    for (int i = 0; i < n; ++i) {
      const double t = rng.uniform(0.1, 4.0);
      const double f = std::min(model::boundary_f(t, pe),
                                model::boundary_f(t, p0));
      in.push_back({rng.uniform(0.02, 1.9) * f, t, 0});
    }
    run(UBranchOp::ClosedFormP);
    for (int i = 0; i < n; ++i) {
      const double x = rng.uniform(0.1, 5.0);
      in.push_back({rng.uniform(0.0, 1.0) * x, rng.uniform(0.0, 5.0), x});
    }
    run(UBranchOp::G1);
    for (int i = 0; i < n; ++i)
      in.push_back({rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0), 0});
    run(UBranchOp::QIntegrand);
    for (int i = 0; i < n; ++i) {
      const double y = rng.uniform(0.1, 3.0);
      const double lo = std::max(model::boundary_f_inverse(y, pe),
                                 model::boundary_f_inverse(y, p0));
      in.push_back({y, lo * (1 + 1e-9) + rng.uniform(0.0, 3.0), 0});
    }
    run(UBranchOp::Q2);

    add("u_zero_limit", worst <= 1e-6, worst, 1e-6, "eps = 1e-8, all ops");
  }

  // 6. Splice continuity at the R1/R2 boundary.
  {
    const int n = quick ? 20 : 100;
    double worst_q = 0.0, worst_p = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = rng.uniform(0.2, 4.0);
      const double x = model::boundary_f(t, params);
      const double s_cross = model::boundary_f_inverse(x, params);
      worst_q = std::max(
          worst_q,
          std::abs(model::q_integrand(x, s_cross, params) -
                   model::survival_kernel(x, params) *
                       std::exp(params.u() * s_cross)));
      const State s(x, t);
      worst_p = std::max(worst_p,
                         std::abs(model::closed_form_P_r1(s, params) -
                                  model::closed_form_P_r2(s, params, quad)));
    }
    add("splice_continuity_q", worst_q <= 1e-10, worst_q, 1e-10);
    add("splice_continuity_P", worst_p <= 1e-8, worst_p, 1e-8);
  }

  // 7. Exact law at x = 0: P(0,t) = e^{-(1-u)t}.
  {
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = 10.0 * i / 1000.0;
      worst = std::max(worst,
                       std::abs(model::closed_form_P(State(0.0, t), params) -
                                std::exp(-params.v() * t)));
    }
    add("x0_law", worst <= 1e-12, worst, 1e-12, "t in [0, 10]");
  }

  // 8. K strictly increasing in x on R1 u R2 slices.
  {
    std::vector<double> ts;
    for (int i = 1; i <= 10; ++i) ts.push_back(0.4 * i);
    std::vector<double> xs;
    const int nxs = quick ? 200 : 1000;
    for (int i = 1; i <= nxs; ++i) xs.push_back(5.0 * i / nxs);
    const MonotonicityReport r = check_monotone_K_in_x(params, ts, xs);
    add("K_monotone_in_x", r.pass && r.min_increment > 0.0, r.min_increment,
        0.0, "strict increase required");
  }

  return report;
}

}  // namespace bomber::verify
