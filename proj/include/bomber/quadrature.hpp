#pragma once

#include <functional>

#include "bomber/types.hpp"

namespace bomber {

struct QuadratureResult {
  double value;
  double error_estimate;
  int subdivisions;
};

/// Adaptive Gauss–Kronrod (G7,K15) integration of f over [a, b].
/// The worst panel is split until the summed error estimate drops below
/// max(abs_tol, rel_tol * |value|). Throws numeric_error (carrying the
/// residual estimate) if max_subdivisions is exhausted first.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureConfig& cfg = {});

}  // namespace bomber
