#include "bomber/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bomber::model {

namespace {

// u/(e^{tu}-1) with the u = 0 limit 1/t, computed via expm1 so small u
// and small t do not cancel.
double rate_over_growth(double t, const ModelParams& params) {
  const double u = params.u();
  if (u == 0.0) return 1.0 / t;
  return u / std::expm1(t * u);
}

}  // namespace

double exp_ramp(double s, const ModelParams& params) {
  const double u = params.u();
  if (u == 0.0) return s;
  return std::expm1(s * u) / u;
}

double survival_kernel(double y, const ModelParams& params) {
  if (!(y >= 0.0))
    throw std::domain_error("survival_kernel: y must be nonnegative, got " +
                            std::to_string(y));
  return 1.0 - params.v() * std::exp(-y);
}

double boundary_f(double t, const ModelParams& params) {
  if (!(t > 0.0))
    throw std::domain_error("boundary_f: requires t > 0, got " +
                            std::to_string(t));
  return std::log1p(rate_over_growth(t, params));
}

double boundary_f_inverse(double x, const ModelParams& params) {
  if (!(x > 0.0))
    throw std::domain_error("boundary_f_inverse: requires x > 0, got " +
                            std::to_string(x));
  const double u = params.u();
  if (u == 0.0) return 1.0 / std::expm1(x);
  // f_u^{-1}(x) = f_u(x/u)/u = log(1 + u/(e^x - 1))/u
  return std::log1p(u / std::expm1(x)) / u;
}

Region classify_region(const State& s, const ModelParams& params) {
  if (!(s.t > 0.0))
    throw std::domain_error("classify_region: requires t > 0, got " +
                            std::to_string(s.t));
  const double f = boundary_f(s.t, params);
  if (s.x <= f) return Region::R1;
  if (s.x <= 2.0 * f) return Region::R2;
  return Region::Outside;
}

double closed_form_K(const State& s, const ModelParams& params) {
  const Region r = classify_region(s, params);
  if (r == Region::R1) return s.x;
  if (r == Region::R2) return 0.5 * (s.x + boundary_f(s.t, params));
  throw unsupported_region_error(
      "closed_form_K: no closed form for x > 2 f_u(t)");
}

double closed_form_P_r1(const State& s, const ModelParams& params) {
  return std::exp(-s.t) *
         (1.0 + survival_kernel(s.x, params) * exp_ramp(s.t, params));
}

double closed_form_P_r2(const State& s, const ModelParams& params,
                        const QuadratureConfig& quad) {
  // On the boundary x = f_u(t) the lower limit equals t up to round-off;
  // clamp so the integral is empty rather than sign-flipped.
  const double lo = std::min(boundary_f_inverse(s.x, params), s.t);
  const QuadratureResult integral = integrate(
      [&](double r) { return q_integrand(s.x, r, params); }, lo, s.t, quad);
  return std::exp(-s.t) * (1.0 + survival_kernel(s.x, params) / std::expm1(s.x) +
                           integral.value);
}

double closed_form_P(const State& s, const ModelParams& params,
                     const QuadratureConfig& quad) {
  if (s.t == 0.0) return 1.0;
  const Region r = classify_region(s, params);
  if (r == Region::R1) return closed_form_P_r1(s, params);
  if (r == Region::R2) return closed_form_P_r2(s, params, quad);
  throw unsupported_region_error(
      "closed_form_P: no closed form for x > 2 f_u(t)");
}

double unimodal_argmax(double x, double B) {
  if (!(x >= 0.0))
    throw std::domain_error("unimodal_argmax: x must be nonnegative");
  if (!(B > 0.0))
    throw std::domain_error("unimodal_argmax: requires B > 0, got " +
                            std::to_string(B));
  const double peak = 0.5 * (x + std::log1p(1.0 / B));
  return std::clamp(peak, 0.0, x);
}

double g1(double y, double s, double x, const ModelParams& params) {
  if (!(y >= 0.0 && y <= x))
    throw std::domain_error("g1: y must lie in [0, x]");
  if (!(s >= 0.0)) throw std::domain_error("g1: s must be nonnegative");
  return survival_kernel(y, params) *
         (1.0 + survival_kernel(x - y, params) * exp_ramp(s, params));
}

double q_integrand(double y, double s, const ModelParams& params) {
  if (!(y >= 0.0)) throw std::domain_error("q_integrand: y must be nonnegative");
  if (!(s >= 0.0)) throw std::domain_error("q_integrand: s must be nonnegative");
  const double u = params.u();
  const double v = params.v();
  if (u == 0.0) {
    const double d = std::sqrt(s + 1.0) - std::exp(-0.5 * y) * std::sqrt(s);
    return d * d;
  }
  const double growth = std::expm1(s * u);  // e^{su} - 1
  const double d =
      std::sqrt(growth + u) - v * std::exp(-0.5 * y) * std::sqrt(growth);
  return d * d / u;
}

double q2(double y, double s, const ModelParams& params,
          const QuadratureConfig& quad) {
  if (!(y > 0.0)) throw std::domain_error("q2: requires y > 0");
  double lo = boundary_f_inverse(y, params);
  // Absorb round-off when (y, s) sits exactly on the boundary.
  if (s < lo && lo - s <= 1e-12 * std::max(1.0, lo)) lo = s;
  if (!(s >= lo))
    throw std::domain_error(
        "q2: s must be at or past the boundary crossing f_u^{-1}(y)");
  const QuadratureResult integral = integrate(
      [&](double r) { return q_integrand(y, r, params); }, lo, s, quad);
  return 1.0 + survival_kernel(y, params) / std::expm1(y) + integral.value;
}

}  // namespace bomber::model
