#pragma once

#include <functional>
#include <vector>

#include "bomber/interpolation.hpp"
#include "bomber/types.hpp"

namespace bomber::solver {

enum class Scheme { Euler, RK4 };

/// Rectangular (x,t) grid for the time march. t_max is capped at 700:
/// pbar = e^t P would overflow past that.
struct GridSpec {
  double x_max = 5.0;
  double t_max = 5.0;
  int nx = 2001;
  int nt = 2001;
  Scheme scheme = Scheme::RK4;
  InterpKind interp = InterpKind::MonotoneCubic;

  double dx() const { return x_max / (nx - 1); }
  double dt() const { return t_max / (nt - 1); }
  void validate() const;
};

/// Discretized pbar(x,t) = e^t P(x,t) and the recorded maximizer kstar(x,t).
/// Storage is t-major: column j (a t-slice over all x) is contiguous.
class SolutionGrid {
public:
  SolutionGrid(const GridSpec& spec, const ModelParams& params);

  const GridSpec& spec() const noexcept { return spec_; }
  const ModelParams& params() const noexcept { return params_; }

  double pbar_at(int i, int j) const { return pbar_[idx(i, j)]; }
  double kstar_at(int i, int j) const { return kstar_[idx(i, j)]; }
  double x_node(int i) const { return spec_.dx() * i; }
  double t_node(int j) const { return spec_.dt() * j; }

  const std::vector<double>& pbar() const noexcept { return pbar_; }
  const std::vector<double>& kstar() const noexcept { return kstar_; }

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * spec_.nx + i;
  }

private:
  friend SolutionGrid solve_integral_equation(const ModelParams&,
                                              const GridSpec&);
  GridSpec spec_;
  ModelParams params_;
  std::vector<double> pbar_;
  std::vector<double> kstar_;
};

/// Time-march d(pbar)/dt = max_{0<=y<=x} a(y) pbar(x-y, t) from pbar(.,0)=1,
/// recording the maximizer at every committed (x,t) node. Deterministic:
/// identical inputs give a bit-identical grid regardless of thread count
/// (BOMBER_THREADS caps workers).
SolutionGrid solve_integral_equation(const ModelParams& params,
                                     const GridSpec& spec);

struct MaxResult {
  double y;
  double value;
};

/// Maximize y -> a(y) * pbar_slice(x - y) over [0, x]: coarse scan followed
/// by golden-section refinement of the bracketing interval. Ties break
/// toward the largest y.
MaxResult inner_max(double x,
                    const std::function<double(double)>& pbar_slice,
                    const ModelParams& params, int scan_points = 129);

/// e^{-t} * bilinear pbar (log-space past t = 30); domain error off-grid.
double numeric_P(const SolutionGrid& grid, const State& s);
/// Bilinear kstar lookup; domain error off-grid.
double numeric_K(const SolutionGrid& grid, const State& s);

}  // namespace bomber::solver
