#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bomber/model.hpp"
#include "doctest.h"

using namespace bomber;
namespace bm = bomber::model;

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// mpmath (40 digits) evaluations of the closed forms.
constexpr double kF05At1 = 0.5714015147584294889;    // f_{0.5}(1)
constexpr double kKAt110 = 0.84657359027997265471;   // K(1,1;u=0)
constexpr double kPR1 = 0.51262872219445481426;      // P(0.5,1;u=0)
constexpr double kPR2u0 = 0.60155735162878970932;    // P(1,1;u=0)
constexpr double kPR2u03 = 0.68793120130990457501;   // P(1,1;u=0.3)
constexpr double kPR2u05 = 0.44205567614167940587;   // P(1.5 f,2;u=0.5)
constexpr double kPR2u08 = 0.88641700176307336605;   // P(1.8 f,1;u=0.8)
constexpr double kQ2At11u03 = 1.8699908837507149429; // q2(1,1;u=0.3)

double brute_force_argmax(double x, double B, const ModelParams& p, int n) {
  double best = -1.0, arg = 0.0;
  for (int k = 0; k < n; ++k) {
    const double y = x * k / (n - 1);
    const double z = std::max(0.0, x - y);
    const double m =
        bm::survival_kernel(y, p) * (1.0 + B * bm::survival_kernel(z, p));
    if (m >= best) {
      best = m;
      arg = y;
    }
  }
  return arg;
}

}  // namespace

TEST_CASE("survival_kernel values and shape") {
  const ModelParams p03(0.3);
  CHECK(bm::survival_kernel(0.0, p03) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(bm::survival_kernel(50.0, p03) == doctest::Approx(1.0).epsilon(1e-15));
  const ModelParams p0(0.0);
  CHECK(bm::survival_kernel(kLn2, p0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(bm::survival_kernel(-0.1, p03), std::domain_error);

  for (double u : {0.0, 0.3, 0.8}) {
    const ModelParams p(u);
    double prev = -1.0, prev_diff = 2.0;
    for (int k = 0; k <= 1000; ++k) {
      const double y = 20.0 * k / 1000.0;
      const double a = bm::survival_kernel(y, p);
      CHECK(a >= u);
      CHECK(a < 1.0);
      if (k > 0) {
        CHECK(a > prev);               // strictly increasing
        CHECK(a - prev < prev_diff);   // concave: increments shrink
        prev_diff = a - prev;
      }
      prev = a;
    }
  }
}

TEST_CASE("boundary_f values, monotonicity, limits") {
  CHECK(bm::boundary_f(1.0, ModelParams(0.0)) ==
        doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(bm::boundary_f(1.0, ModelParams(0.5)) ==
        doctest::Approx(kF05At1).epsilon(1e-14));
  CHECK_THROWS_AS(bm::boundary_f(0.0, ModelParams(0.3)), std::domain_error);
  CHECK_THROWS_AS(bm::boundary_f(-1.0, ModelParams(0.3)), std::domain_error);

  // l'Hopital limit: u -> 0 matches the u = 0 branch.
  const ModelParams peps(1e-8), p0(0.0);
  CHECK(std::abs(bm::boundary_f(1.0, peps) - bm::boundary_f(1.0, p0)) < 1e-6);

  for (double u : {0.0, 0.3, 0.8}) {
    const ModelParams p(u);
    double prev = bm::boundary_f(1e-3, p);
    for (double t : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 50.0}) {
      const double f = bm::boundary_f(t, p);
      CHECK(f < prev);  // strictly decreasing
      prev = f;
    }
    CHECK(bm::boundary_f(1e-8, p) > 17.0);   // diverges at 0+
    CHECK(bm::boundary_f(200.0, p) < 0.01);  // vanishes at infinity
  }
}

TEST_CASE("boundary_f_inverse inverts boundary_f") {
  CHECK(bm::boundary_f_inverse(kLn2, ModelParams(0.0)) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(bm::boundary_f_inverse(0.0, ModelParams(0.3)),
                  std::domain_error);
  CHECK(bm::boundary_f_inverse(30.0, ModelParams(0.0)) < 1e-12);

  for (double u : {0.0, 0.3, 0.8}) {
    const ModelParams p(u);
    for (double t : {0.1, 1.0, 10.0})
      CHECK(std::abs(bm::boundary_f_inverse(bm::boundary_f(t, p), p) - t) <=
            1e-12);
    // Wider sweep per the round-trip invariant.
    for (int k = 0; k <= 40; ++k) {
      const double t = std::exp(std::log(1e-3) +
                                k * (std::log(50.0) - std::log(1e-3)) / 40.0);
      CHECK(std::abs(bm::boundary_f_inverse(bm::boundary_f(t, p), p) - t) <=
            1e-10 * std::max(1.0, t));
    }
  }
}

TEST_CASE("classify_region boundary membership is inclusive") {
  for (double u : {0.0, 0.3, 0.7}) {
    const ModelParams p(u);
    for (double t : {0.25, 1.0, 3.0}) {
      const double f = bm::boundary_f(t, p);
      CHECK(bm::classify_region(State(f, t), p) == Region::R1);
      CHECK(bm::classify_region(State(std::nextafter(f, 2.0 * f), t), p) ==
            Region::R2);
      CHECK(bm::classify_region(State(2.0 * f, t), p) == Region::R2);
      CHECK(bm::classify_region(State(std::nextafter(2.0 * f, 3.0 * f), t),
                                p) == Region::Outside);
      CHECK(bm::classify_region(State(3.0 * f, t), p) == Region::Outside);
      CHECK(bm::classify_region(State(0.0, t), p) == Region::R1);
    }
  }
  CHECK_THROWS_AS(bm::classify_region(State(1.0, 0.0), ModelParams(0.3)),
                  std::domain_error);
}

TEST_CASE("region tags partition and are monotone in x") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> td(0.05, 6.0);
  for (double u : {0.0, 0.4, 0.9}) {
    const ModelParams p(u);
    for (int rep = 0; rep < 50; ++rep) {
      const double t = td(gen);
      const double f = bm::boundary_f(t, p);
      Region prev = Region::R1;
      for (int k = 0; k <= 300; ++k) {
        const double x = 3.0 * f * k / 300.0;
        const Region r = bm::classify_region(State(x, t), p);
        // never move backwards R1 -> R2 -> Outside
        CHECK(static_cast<int>(r) >= static_cast<int>(prev));
        prev = r;
      }
      CHECK(prev == Region::Outside);
    }
  }
}

TEST_CASE("closed_form_K branches, continuity, frozen value") {
  const ModelParams p0(0.0);
  CHECK(bm::closed_form_K(State(0.5, 1.0), p0) == 0.5);  // R1: spend it all
  CHECK(bm::closed_form_K(State(1.0, 1.0), p0) ==
        doctest::Approx(kKAt110).epsilon(1e-15));
  CHECK_THROWS_AS(bm::closed_form_K(State(9.0, 9.0), ModelParams(0.3)),
                  unsupported_region_error);

  for (double u : {0.0, 0.3, 0.7}) {
    const ModelParams p(u);
    const double t = 1.3;
    const double f = bm::boundary_f(t, p);
    for (double eps : {1e-4, 1e-6, 1e-8}) {
      const double below = bm::closed_form_K(State(f - eps, t), p);
      const double above = bm::closed_form_K(State(f + eps, t), p);
      CHECK(std::abs(above - below) <= 2.0 * eps);
    }
  }
}

TEST_CASE("closed_form_K == x exactly iff R1; K <= x; increasing in x") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> td(0.1, 5.0), xi(0.0, 1.0);
  for (double u : {0.0, 0.3, 0.5, 0.8}) {
    const ModelParams p(u);
    for (int rep = 0; rep < 200; ++rep) {
      const double t = td(gen);
      const double f = bm::boundary_f(t, p);
      const double x = xi(gen) * 2.0 * f;
      if (x == 0.0) continue;
      const State s(x, t);
      const double K = bm::closed_form_K(s, p);
      CHECK(K <= x);
      if (bm::classify_region(s, p) == Region::R1)
        CHECK(K == x);
      else
        CHECK(K < x);
    }
    // affine slopes 1 (R1) and 1/2 (R2)
    const double t = 0.8;
    const double f = bm::boundary_f(t, p);
    double prev = -1.0;
    for (int k = 1; k <= 500; ++k) {
      const double x = 2.0 * f * k / 500.0;
      const double K = bm::closed_form_K(State(x, t), p);
      CHECK(K > prev);
      prev = K;
    }
  }
}

TEST_CASE("closed_form_P frozen oracle values") {
  CHECK(bm::closed_form_P(State(0.7, 0.0), ModelParams(0.3)) == 1.0);
  CHECK(bm::closed_form_P(State(0.5, 1.0), ModelParams(0.0)) ==
        doctest::Approx(kPR1).epsilon(1e-14));
  CHECK(bm::closed_form_P(State(1.0, 1.0), ModelParams(0.0)) ==
        doctest::Approx(kPR2u0).epsilon(1e-11));
  CHECK(bm::closed_form_P(State(1.0, 1.0), ModelParams(0.3)) ==
        doctest::Approx(kPR2u03).epsilon(1e-11));
  {
    const ModelParams p(0.5);
    const double x = 1.5 * bm::boundary_f(2.0, p);
    CHECK(bm::closed_form_P(State(x, 2.0), p) ==
          doctest::Approx(kPR2u05).epsilon(1e-11));
  }
  {
    const ModelParams p(0.8);
    const double x = 1.8 * bm::boundary_f(1.0, p);
    CHECK(bm::closed_form_P(State(x, 1.0), p) ==
          doctest::Approx(kPR2u08).epsilon(1e-11));
  }
  CHECK_THROWS_AS(bm::closed_form_P(State(9.0, 9.0), ModelParams(0.3)),
                  unsupported_region_error);
}

TEST_CASE("closed_form_P x=0 law and range") {
  for (double u : {0.0, 0.3, 0.5, 0.8}) {
    const ModelParams p(u);
    for (int k = 0; k <= 100; ++k) {
      const double t = 10.0 * k / 100.0;
      CHECK(std::abs(bm::closed_form_P(State(0.0, t), p) -
                     std::exp(-(1.0 - u) * t)) <= 1e-12);
    }
  }
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> td(0.05, 4.0), xi(0.0, 1.0);
  for (double u : {0.0, 0.45, 0.9}) {
    const ModelParams p(u);
    for (int rep = 0; rep < 100; ++rep) {
      const double t = td(gen);
      const double x = xi(gen) * 2.0 * bm::boundary_f(t, p);
      const double P = bm::closed_form_P(State(x, t), p);
      CHECK(P > 0.0);
      CHECK(P <= 1.0);
    }
  }
}

TEST_CASE("closed_form_P continuous across the R1/R2 boundary") {
  for (double u : {0.0, 0.3, 0.5, 0.8}) {
    const ModelParams p(u);
    for (double t : {0.3, 1.0, 2.5}) {
      const double x = bm::boundary_f(t, p);
      const State s(x, t);
      CHECK(std::abs(bm::closed_form_P_r1(s, p) -
                     bm::closed_form_P_r2(s, p)) <= 1e-8);
    }
  }
}

TEST_CASE("unimodal_argmax matches a dense scan") {
  const int n = 10001;
  std::mt19937_64 gen(19);
  std::uniform_real_distribution<double> xd(0.01, 8.0), logB(-4.0, 4.0);
  for (double u : {0.0, 0.3, 0.5, 0.8}) {
    const ModelParams p(u);
    for (int rep = 0; rep < 200; ++rep) {
      const double x = xd(gen);
      const double B = std::exp(logB(gen));
      const double step = x / (n - 1);
      CHECK(std::abs(bm::unimodal_argmax(x, B) -
                     brute_force_argmax(x, B, p, n)) <= step);
    }
  }
  CHECK_THROWS_AS(bm::unimodal_argmax(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(bm::unimodal_argmax(1.0, -2.0), std::domain_error);
}

TEST_CASE("unimodal_argmax clamped and interior cases from the R1/R2 split") {
  for (double u : {0.2, 0.6}) {
    const ModelParams p(u);
    // f_u(s) >= x forces the peak past x: maximum at y = x.
    {
      const double s = 0.05;  // f large
      const double x = 0.5 * bm::boundary_f(s, p);
      const double B = std::expm1(s * u) / u;
      CHECK(bm::unimodal_argmax(x, B) == x);
    }
    // x - f_u(s) <= y* <= x: interior peak (x + f_u(s)) / 2.
    {
      const double s = 1.5;
      const double f = bm::boundary_f(s, p);
      const double x = 1.5 * f;
      const double B = std::expm1(s * u) / u;
      CHECK(bm::unimodal_argmax(x, B) ==
            doctest::Approx(0.5 * (x + f)).epsilon(1e-13));
    }
  }
}

TEST_CASE("g1 endpoint identities and argmax") {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> xd(0.2, 4.0), sd(0.1, 4.0);
  for (double u : {0.1, 0.5, 0.9}) {
    const ModelParams p(u);
    for (int rep = 0; rep < 50; ++rep) {
      const double x = xd(gen), s = sd(gen);
      const double ax = bm::survival_kernel(x, p);
      CHECK(bm::g1(x, s, x, p) ==
            doctest::Approx(ax * std::exp(s * u)).epsilon(1e-13));
      CHECK(bm::g1(0.0, s, x, p) ==
            doctest::Approx(u * (1.0 + ax * std::expm1(s * u) / u))
                .epsilon(1e-13));
    }
  }
  // u = 0 uses the limit factor s in place of (e^{su}-1)/u.
  const ModelParams p0(0.0);
  CHECK(bm::g1(0.4, 2.0, 1.0, p0) ==
        doctest::Approx(bm::survival_kernel(0.4, p0) *
                        (1.0 + bm::survival_kernel(0.6, p0) * 2.0))
            .epsilon(1e-15));
  CHECK_THROWS_AS(bm::g1(1.5, 1.0, 1.0, p0), std::domain_error);
  CHECK_THROWS_AS(bm::g1(-0.1, 1.0, 1.0, p0), std::domain_error);

  // argmax over y in [0,x] agrees with unimodal_argmax at B = (e^{su}-1)/u.
  for (double u : {0.0, 0.4}) {
    const ModelParams p(u);
    const double x = 1.2, s = 2.0;
    const double B = u == 0.0 ? s : std::expm1(s * u) / u;
    const int n = 20001;
    double best = -1.0, arg = 0.0;
    for (int k = 0; k < n; ++k) {
      const double y = x * k / (n - 1);
      const double m = bm::g1(y, s, x, p);
      if (m >= best) {
        best = m;
        arg = y;
      }
    }
    CHECK(std::abs(arg - bm::unimodal_argmax(x, B)) <= x / (n - 1));
  }
}

TEST_CASE("q_integrand identities") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> yd(0.05, 3.0), sd(0.0, 4.0);
  for (double u : {0.0, 0.3, 0.5, 0.8}) {
    const ModelParams p(u);
    for (int rep = 0; rep < 100; ++rep) {
      const double y = yd(gen);
      const double s = sd(gen);
      CHECK(bm::q_integrand(y, s, p) >= 0.0);
      // splice: q at the boundary crossing equals the R1 maximand value
      const double sc = bm::boundary_f_inverse(y, p);
      const double lhs = bm::q_integrand(y, sc, p);
      const double rhs = bm::survival_kernel(y, p) * std::exp(u * sc);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
  // u = 0 branch is (sqrt(s+1) - e^{-y/2} sqrt(s))^2.
  const ModelParams p0(0.0);
  const double d = std::sqrt(3.0) - std::exp(-0.35) * std::sqrt(2.0);
  CHECK(bm::q_integrand(0.7, 2.0, p0) ==
        doctest::Approx(d * d).epsilon(1e-15));
  // e^{-y/2} -> 0: q -> (e^{su} - v)/u.
  const ModelParams p03(0.3);
  CHECK(bm::q_integrand(80.0, 2.0, p03) ==
        doctest::Approx((std::expm1(0.6) + 0.3) / 0.3).epsilon(1e-12));
}

TEST_CASE("g1 at the interior peak equals q_integrand") {
  // G1((x+f(s))/2, s) = q(x, s): the boundary-crossing value after
  // simplification; holds wherever the peak lies inside [0, x].
  std::mt19937_64 gen(37);
  std::uniform_real_distribution<double> sd(0.3, 3.0), fac(1.0, 3.0);
  for (double u : {0.05, 0.3, 0.6, 0.9}) {
    const ModelParams p(u);
    for (int rep = 0; rep < 50; ++rep) {
      const double s = sd(gen);
      const double f = bm::boundary_f(s, p);
      const double x = fac(gen) * f;
      const double lhs = bm::g1(0.5 * (x + f), s, x, p);
      const double rhs = bm::q_integrand(x, s, p);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("q2 boundary values and relation to P") {
  const ModelParams p03(0.3);
  // Empty integration interval at s = f^{-1}(y).
  for (double y : {0.3, 0.9, 2.0}) {
    const double sc = bm::boundary_f_inverse(y, p03);
    CHECK(bm::q2(y, sc, p03) ==
          doctest::Approx(1.0 + bm::survival_kernel(y, p03) / std::expm1(y))
              .epsilon(1e-14));
  }
  const ModelParams p0(0.0);
  for (double y : {0.4, 1.1}) {
    const double sc = bm::boundary_f_inverse(y, p0);
    CHECK(bm::q2(y, sc, p0) ==
          doctest::Approx(1.0 + std::exp(-y)).epsilon(1e-13));
  }
  CHECK(bm::q2(1.0, 1.0, p03) ==
        doctest::Approx(kQ2At11u03).epsilon(1e-11));
  CHECK_THROWS_AS(
      bm::q2(1.0, 0.9 * bm::boundary_f_inverse(1.0, p03), p03),
      std::domain_error);
  CHECK_THROWS_AS(bm::q2(0.0, 1.0, p03), std::domain_error);

  // e^{-t} q2(x,t) is the R2 survival probability by definition.
  for (double u : {0.0, 0.3, 0.6}) {
    const ModelParams p(u);
    const double t = 1.4;
    const double x = 1.4 * bm::boundary_f(t, p);
    CHECK(std::exp(-t) * bm::q2(x, t, p) ==
          doctest::Approx(bm::closed_form_P(State(x, t), p)).epsilon(1e-13));
  }
}

TEST_CASE("u -> 0 branches agree at u = 1e-8") {
  const ModelParams pe(1e-8), p0(0.0);
  double worst = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double t = 0.1 + 9.9 * k / 50.0;
    worst = std::max(worst, std::abs(bm::boundary_f(t, pe) -
                                     bm::boundary_f(t, p0)));
  }
  for (int k = 1; k <= 50; ++k) {
    const double x = 0.05 + 4.0 * k / 50.0;
    worst = std::max(worst, std::abs(bm::boundary_f_inverse(x, pe) -
                                     bm::boundary_f_inverse(x, p0)));
    worst = std::max(worst, std::abs(bm::q_integrand(x, 1.7, pe) -
                                     bm::q_integrand(x, 1.7, p0)));
    worst = std::max(worst, std::abs(bm::g1(0.5 * x, 2.0, x, pe) -
                                     bm::g1(0.5 * x, 2.0, x, p0)));
  }
  for (int k = 1; k <= 20; ++k) {
    const double t = 0.2 + 3.0 * k / 20.0;
    const double f = std::min(bm::boundary_f(t, pe), bm::boundary_f(t, p0));
    for (double frac : {0.3, 0.9, 1.6}) {
      const State s(frac * f, t);
      worst = std::max(worst, std::abs(bm::closed_form_P(s, pe) -
                                       bm::closed_form_P(s, p0)));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("ModelParams and State validation") {
  CHECK_THROWS_AS(ModelParams(-0.1), std::domain_error);
  CHECK_THROWS_AS(ModelParams(1.0), std::domain_error);
  CHECK_THROWS_AS(ModelParams(1.5), std::domain_error);
  CHECK(ModelParams(0.25).v() == 0.75);
  CHECK_THROWS_AS(State(-1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(State(1.0, -1.0), std::domain_error);
}
