#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bomber/rng.hpp"
#include "bomber/solver.hpp"
#include "bomber/types.hpp"

namespace bomber::montecarlo {

enum class PolicyKind { ClosedForm, GridInterpolated, SpendAll, Fractional };

/// Deterministic allocation rule State -> y in [0, x].
class Policy {
public:
  /// Theorem-form allocation, defined on R1 u R2. Outside those regions it
  /// delegates to the fallback grid when one is attached, else throws
  /// unsupported_region_error.
  static Policy closed_form(const solver::SolutionGrid* fallback = nullptr);
  static Policy grid_interpolated(const solver::SolutionGrid* grid);
  static Policy spend_all();
  static Policy fractional(double c);

  double allocation(const State& s, const ModelParams& params) const;
  PolicyKind kind() const noexcept { return kind_; }
  const char* name() const noexcept;

private:
  PolicyKind kind_ = PolicyKind::SpendAll;
  double fraction_ = 1.0;
  const solver::SolutionGrid* grid_ = nullptr;
};

struct SimConfig {
  int64_t n_runs = 1;
  uint64_t seed = 0;
  int n_streams = 1;

  void validate() const {
    if (n_runs < 1) throw std::domain_error("SimConfig: n_runs must be >= 1");
    if (n_streams < 1)
      throw std::domain_error("SimConfig: n_streams must be >= 1");
  }
};

struct SimResult {
  double p_hat;
  double std_err;  // sqrt(p_hat (1 - p_hat) / n_runs)
  int64_t n_runs;
};

/// One encounter on a mission trajectory, for trace-based tests.
struct Encounter {
  double t_remaining;
  double x_before;
  double y_fired;
  bool survived;
};

/// Runs one mission from s0: exponential(1) inter-arrival times; at each
/// arrival before the clock runs out, fire policy(x, t_remaining) and
/// survive with probability a(y). Two draws per encounter (arrival,
/// outcome). Allocations outside [0, x] are clamped (warned once on stderr).
bool simulate_mission(const Policy& policy, const State& s0,
                      const ModelParams& params, RngStream& rng,
                      std::vector<Encounter>* trace = nullptr);

/// n_runs missions spread over n_streams counter-based streams (run r uses
/// stream r % n_streams, run index r / n_streams). Bit-reproducible for a
/// fixed (seed, n_streams, n_runs) regardless of thread count.
SimResult estimate_survival(const Policy& policy, const State& s0,
                            const ModelParams& params, const SimConfig& cfg);

}  // namespace bomber::montecarlo
