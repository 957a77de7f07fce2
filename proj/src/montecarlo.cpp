#include "bomber/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "bomber/model.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bomber::montecarlo {

namespace {

int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("BOMBER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::max(1, n);
#else
  return 1;
#endif
}

std::atomic<bool> g_clamp_warned{false};

void warn_clamp_once(double y, double x) {
  if (!g_clamp_warned.exchange(true))
    std::fprintf(stderr,
                 "bomber: policy allocation %.6g outside [0, %.6g]; clamping "
                 "(reported once)\n",
                 y, x);
}

}  // namespace

Policy Policy::closed_form(const solver::SolutionGrid* fallback) {
  Policy p;
  p.kind_ = PolicyKind::ClosedForm;
  p.grid_ = fallback;
  return p;
}

Policy Policy::grid_interpolated(const solver::SolutionGrid* grid) {
  if (grid == nullptr)
    throw std::domain_error("Policy::grid_interpolated: grid required");
  Policy p;
  p.kind_ = PolicyKind::GridInterpolated;
  p.grid_ = grid;
  return p;
}

Policy Policy::spend_all() {
  Policy p;
  p.kind_ = PolicyKind::SpendAll;
  return p;
}

Policy Policy::fractional(double c) {
  Policy p;
  p.kind_ = PolicyKind::Fractional;
  p.fraction_ = c;
  return p;
}

const char* Policy::name() const noexcept {
  switch (kind_) {
    case PolicyKind::ClosedForm: return "closed_form";
    case PolicyKind::GridInterpolated: return "grid";
    case PolicyKind::SpendAll: return "spend_all";
    default: return "fractional";
  }
}

double Policy::allocation(const State& s, const ModelParams& params) const {
  double y;
  switch (kind_) {
    case PolicyKind::ClosedForm: {
      if (s.x == 0.0) return 0.0;
      const Region r = model::classify_region(s, params);
      if (r != Region::Outside) {
        y = model::closed_form_K(s, params);
      } else if (grid_ != nullptr) {
        y = solver::numeric_K(*grid_, s);
      } else {
        throw unsupported_region_error(
            "Policy::closed_form: state outside R1 u R2 and no fallback "
            "grid attached");
      }
      break;
    }
    case PolicyKind::GridInterpolated:
      y = solver::numeric_K(*grid_, s);
      break;
    case PolicyKind::SpendAll:
      y = s.x;
      break;
    default:
      y = fraction_ * s.x;
      break;
  }
  if (y < 0.0 || y > s.x) {
    warn_clamp_once(y, s.x);
    y = std::clamp(y, 0.0, s.x);
  }
  return y;
}

bool simulate_mission(const Policy& policy, const State& s0,
                      const ModelParams& params, RngStream& rng,
                      std::vector<Encounter>* trace) {
  double x = s0.x;
  double t_rem = s0.t;
  for (;;) {
    const double gap = rng.next_exponential();
    if (gap >= t_rem) return true;  // destination reached
    t_rem -= gap;
    const double y = policy.allocation(State(x, t_rem), params);
    const double a = model::survival_kernel(y, params);
    const bool survived = rng.next_unit() < a;
    if (trace != nullptr) trace->push_back({t_rem, x, y, survived});
    if (!survived) return false;
    x = std::max(0.0, x - y);
  }
}

SimResult estimate_survival(const Policy& policy, const State& s0,
                            const ModelParams& params, const SimConfig& cfg) {
  cfg.validate();
  const int64_t n = cfg.n_runs;
  int64_t survived = 0;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_count()) \
    reduction(+ : survived)
#endif
  for (int64_t r = 0; r < n; ++r) {
    RngStream rng(cfg.seed, static_cast<uint64_t>(r % cfg.n_streams),
                  static_cast<uint64_t>(r / cfg.n_streams));
    if (simulate_mission(policy, s0, params, rng)) ++survived;
  }

  const double p = static_cast<double>(survived) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

}  // namespace bomber::montecarlo
