#pragma once

#include <stdexcept>
#include <string>

namespace bomber {

/// Thrown where no closed form exists: x > 2 f_u(t).
class unsupported_region_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Quadrature or time-marching failure. Carries the best residual estimate
/// available at the point of failure.
class numeric_error : public std::runtime_error {
public:
  numeric_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// Counterattack survival parameter u, 0 <= u < 1, with its complement
/// v = 1 - u cached. Firing y destroys the enemy with probability 1 - e^{-y};
/// otherwise the counterattack is survived with probability u.
class ModelParams {
public:
  explicit ModelParams(double u) : u_(u), v_(1.0 - u) {
    if (!(u >= 0.0 && u < 1.0))
      throw std::domain_error("ModelParams: u must satisfy 0 <= u < 1, got " +
                              std::to_string(u));
  }
  double u() const noexcept { return u_; }
  double v() const noexcept { return v_; }

private:
  double u_;
  double v_;
};

/// A point (x ammunition, t time-to-go) in the nonnegative quadrant.
/// Enemy arrivals form a Poisson process of intensity 1.
struct State {
  double x;
  double t;

  State(double x_, double t_) : x(x_), t(t_) {
    if (!(x >= 0.0))
      throw std::domain_error("State: x must be nonnegative, got " + std::to_string(x));
    if (!(t >= 0.0))
      throw std::domain_error("State: t must be nonnegative, got " + std::to_string(t));
  }
};

/// Region of the (x,t) quadrant relative to the boundary f_u(t).
/// R1: x <= f_u(t); R2: f_u(t) < x <= 2 f_u(t); Outside: x > 2 f_u(t).
enum class Region { R1, R2, Outside };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    default: return "Outside";
  }
}

/// Tolerances for the adaptive quadrature that evaluates the R2 integrals.
struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 50;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw std::domain_error("QuadratureConfig: tolerances must be positive");
    if (max_subdivisions < 1)
      throw std::domain_error("QuadratureConfig: max_subdivisions must be >= 1");
  }
};

}  // namespace bomber
