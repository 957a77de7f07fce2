#include "bomber/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bomber::solver {

namespace {

// Fritsch–Carlson monotone slopes on a uniform grid. Secant averages,
// zeroed across local extrema, limited to 3x the adjacent secants.
std::vector<double> monotone_slopes(std::span<const double> v, double dx) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n == 1) return d;
  std::vector<double> sec(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (v[i + 1] - v[i]) / dx;

  auto limit = [](double slope, double s_left, double s_right) {
    if (s_left * s_right <= 0.0) return 0.0;
    const double bound = 3.0 * std::min(std::abs(s_left), std::abs(s_right));
    return std::clamp(slope, -bound, bound);
  };

  for (std::size_t i = 1; i + 1 < n; ++i)
    d[i] = limit(0.5 * (sec[i - 1] + sec[i]), sec[i - 1], sec[i]);

  // One-sided ends, clamped against the first secant.
  auto end_slope = [](double s0, double s1) {
    double d0 = 1.5 * s0 - 0.5 * s1;
    if (d0 * s0 <= 0.0) return 0.0;
    if (std::abs(d0) > 3.0 * std::abs(s0)) return 3.0 * s0;
    return d0;
  };
  d[0] = (n == 2) ? sec[0] : end_slope(sec[0], sec[1]);
  d[n - 1] = (n == 2) ? sec[0] : end_slope(sec[n - 2], sec[n - 3]);
  return d;
}

}  // namespace

SliceInterpolant::SliceInterpolant(std::span<const double> values, double dx,
                                   InterpKind kind)
    : v_(values), dx_(dx), n_(values.size()), kind_(kind) {
  if (n_ < 2) throw std::domain_error("SliceInterpolant: need >= 2 nodes");
  if (!(dx > 0.0)) throw std::domain_error("SliceInterpolant: dx must be > 0");
  if (kind_ == InterpKind::MonotoneCubic) slope_ = monotone_slopes(v_, dx_);
}

double SliceInterpolant::operator()(double xq) const {
  if (!(xq >= 0.0 && xq <= x_max()))
    throw std::domain_error("SliceInterpolant: query " + std::to_string(xq) +
                            " outside [0, " + std::to_string(x_max()) + "]");
  std::size_t k = static_cast<std::size_t>(xq / dx_);
  if (k >= n_ - 1) k = n_ - 2;
  const double th = xq / dx_ - static_cast<double>(k);
  // Snap queries that land on a node up to round-off; keeps node values exact.
  if (th <= 1e-12) return v_[k];
  if (th >= 1.0 - 1e-12) return v_[k + 1];

  if (kind_ == InterpKind::Linear) return v_[k] + th * (v_[k + 1] - v_[k]);

  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
  const double h10 = th3 - 2.0 * th2 + th;
  const double h01 = -2.0 * th3 + 3.0 * th2;
  const double h11 = th3 - th2;
  return h00 * v_[k] + h10 * dx_ * slope_[k] + h01 * v_[k + 1] +
         h11 * dx_ * slope_[k + 1];
}

double interpolate(std::span<const double> values, double dx, double x_query,
                   InterpKind kind) {
  return SliceInterpolant(values, dx, kind)(x_query);
}

}  // namespace bomber::solver
