#pragma once

#include "bomber/quadrature.hpp"
#include "bomber/types.hpp"

namespace bomber::model {

/// Survival probability of a single encounter when firing y units:
/// a(y) = 1 - (1-u) e^{-y}. Strictly increasing, range [u, 1).
double survival_kernel(double y, const ModelParams& params);

/// The spend-it-all boundary f_u(t) = log(1 + u/(e^{tu}-1)), with the u = 0
/// limit log(1/t + 1). Strictly decreasing on t > 0.
double boundary_f(double t, const ModelParams& params);

/// Inverse of boundary_f: the time at which the boundary passes through
/// ammunition level x. Equals f_u(x/u)/u for u > 0 and 1/(e^x - 1) at u = 0.
double boundary_f_inverse(double x, const ModelParams& params);

/// R1 iff x <= f_u(t), R2 iff f_u(t) < x <= 2 f_u(t), Outside beyond.
/// Comparisons are exact on the computed f_u(t). Requires t > 0.
Region classify_region(const State& s, const ModelParams& params);

/// Optimal allocation: x on R1, (x + f_u(t))/2 on R2. Throws
/// unsupported_region_error Outside (no closed form there).
double closed_form_K(const State& s, const ModelParams& params);

/// Optimal survival probability on R1 u R2 (t = 0 returns 1). The R2 branch
/// integrates q_integrand over [f_u^{-1}(x), t] by adaptive quadrature.
double closed_form_P(const State& s, const ModelParams& params,
                     const QuadratureConfig& quad = {});

/// The two branches individually, for continuity checks at x = f_u(t).
double closed_form_P_r1(const State& s, const ModelParams& params);
double closed_form_P_r2(const State& s, const ModelParams& params,
                        const QuadratureConfig& quad = {});

/// Maximizer of y -> a(y) (1 + B a(x-y)) over [0, x]: the unconstrained
/// peak (x + log(1 + 1/B))/2 clamped to the interval.
double unimodal_argmax(double x, double B);

/// G1(y,s) = a(y) [1 + a(x-y) (e^{su}-1)/u], the integrand maximand while
/// the continuation state stays in R1. u = 0 replaces (e^{su}-1)/u by s.
double g1(double y, double s, double x, const ModelParams& params);

/// q(y,s) = (sqrt(e^{su}-v) - v e^{-y/2} sqrt(e^{su}-1))^2 / u, the maximized
/// integrand past the boundary; u = 0 limit (sqrt(s+1) - e^{-y/2} sqrt(s))^2.
double q_integrand(double y, double s, const ModelParams& params);

/// Q2(y,s) = 1 + a(y)/(e^y-1) + integral of q_integrand(y,.) over
/// [f_u^{-1}(y), s]. Requires y > 0 and s >= f_u^{-1}(y).
double q2(double y, double s, const ModelParams& params,
          const QuadratureConfig& quad = {});

/// (e^{su}-1)/u evaluated stably, with the u = 0 limit s. This is the
/// accumulated weight of encounters over a lookback of length s.
double exp_ramp(double s, const ModelParams& params);

}  // namespace bomber::model
