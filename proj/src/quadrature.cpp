#include "bomber/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bomber {

namespace {

// QUADPACK dqk15 abscissae and weights. xgk holds the positive Kronrod
// nodes (odd indices are the embedded Gauss-7 nodes), wgk the Kronrod
// weights, wg the Gauss weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
};

// Single G7/K15 evaluation on [a,b] with the QUADPACK error heuristic.
Panel gauss_kronrod_15(const std::function<double(double)>& f, double a,
                       double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);

  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    const double sum = fv1[j] + fv2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }

  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  resabs *= std::abs(half);
  resasc *= std::abs(half);

  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  const double tiny = std::numeric_limits<double>::min();
  if (resabs > tiny / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);

  return Panel{a, b, resk * half, err};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureConfig& cfg) {
  cfg.validate();
  if (a == b) return {0.0, 0.0, 0};
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::vector<Panel> panels;
  panels.push_back(gauss_kronrod_15(f, a, b));

  auto worse = [](const Panel& p, const Panel& q) { return p.error < q.error; };

  int splits = 0;
  for (;;) {
    double total = 0.0, err = 0.0;
    for (const Panel& p : panels) {
      total += p.value;
      err += p.error;
    }
    if (!std::isfinite(total) || !std::isfinite(err))
      throw numeric_error("quadrature: non-finite integrand encountered", err);
    if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)))
      return {sign * total, err, splits};
    if (splits >= cfg.max_subdivisions)
      throw numeric_error(
          "quadrature: tolerance not reached after " +
              std::to_string(splits) + " subdivisions",
          err);

    std::pop_heap(panels.begin(), panels.end(), worse);
    const Panel p = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (p.a + p.b);
    panels.push_back(gauss_kronrod_15(f, p.a, mid));
    std::push_heap(panels.begin(), panels.end(), worse);
    panels.push_back(gauss_kronrod_15(f, mid, p.b));
    std::push_heap(panels.begin(), panels.end(), worse);
    ++splits;
  }
}

}  // namespace bomber
