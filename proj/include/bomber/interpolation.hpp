#pragma once

#include <span>
#include <vector>

#include "bomber/types.hpp"

namespace bomber::solver {

enum class InterpKind { MonotoneCubic, Linear };

/// 1-D interpolant over uniformly spaced nodes x_i = i*dx. Exact at nodes.
/// MonotoneCubic uses Fritsch–Carlson limited slopes, so the interpolant
/// never leaves the hull of neighboring node values (the >= 1 lower bound
/// of pbar slices survives interpolation). Holds a view of the values: the
/// caller keeps them alive.
class SliceInterpolant {
public:
  SliceInterpolant(std::span<const double> values, double dx,
                   InterpKind kind = InterpKind::MonotoneCubic);

  /// Throws std::domain_error outside [0, x_max].
  double operator()(double xq) const;

  double x_max() const noexcept { return dx_ * static_cast<double>(n_ - 1); }

private:
  std::span<const double> v_;
  std::vector<double> slope_;  // empty for Linear
  double dx_;
  std::size_t n_;
  InterpKind kind_;
};

/// One-off interpolation of tabulated values at x_query (the class above is
/// the reusable form).
double interpolate(std::span<const double> values, double dx, double x_query,
                   InterpKind kind = InterpKind::MonotoneCubic);

}  // namespace bomber::solver
