#include "bomber/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "bomber/model.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bomber::solver {

namespace {

int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("BOMBER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::max(1, n);
#else
  return 1;
#endif
}

constexpr double kInvPhi = 0.6180339887498949;

// Golden-section maximization on [lo, hi]. Ties retreat to the right half,
// so plateaus resolve toward the largest y.
template <class F>
MaxResult golden_max(F&& f, double lo, double hi, double xtol) {
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > xtol) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return fd >= fc ? MaxResult{d, fd} : MaxResult{c, fc};
}

struct ScanResult {
  int k;
  double value;
};

// argmax over k of a[k] * s[i-k]; ties go to the larger k (larger y).
inline ScanResult scan_row(const double* a, const double* s, int i) {
  double best = a[0] * s[i];
  int bk = 0;
  for (int k = 1; k <= i; ++k) {
    const double m = a[k] * s[i - k];
    if (m >= best) {
      best = m;
      bk = k;
    }
  }
  return {bk, best};
}

// Max value of the scan refined by the parabola through the bracketing
// triple. Vertex offset is at most half a grid step; the value correction
// removes the O(dx^2) bias of the bare scan.
inline double refined_value(const double* a, const double* s, int i,
                            const ScanResult& r) {
  if (r.k == 0 || r.k == i) return r.value;  // endpoint max is exact
  const double d0 = r.value - a[r.k - 1] * s[i - r.k + 1];
  const double d2 = r.value - a[r.k + 1] * s[i - r.k - 1];
  const double denom = d0 + d2;
  if (!(denom > 0.0)) return r.value;  // flat triple
  const double diff = d0 - d2;
  return r.value + diff * diff / (8.0 * denom);
}

// One evaluation of the marched right-hand side: out[i] = refined
// max_{0<=y<=x_i} a(y) s(x_i - y), scanned at exact node offsets.
void stage_max(const std::vector<double>& a, const double* s, int nx,
               double* out, int nthreads) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
  for (int i = 0; i < nx; ++i) {
    const ScanResult r = scan_row(a.data(), s, i);
    out[i] = refined_value(a.data(), s, i, r);
  }
  (void)nthreads;
}

// Committed-step sweep: full inner max (scan + golden refinement against the
// interpolated slice) for every node, recording the maximizer.
void record_kstar(const std::vector<double>& a, const double* s, int nx,
                  double dx, const ModelParams& params, InterpKind interp_kind,
                  double* kstar_col, int nthreads) {
  const SliceInterpolant interp(std::span<const double>(s, nx), dx,
                                interp_kind);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
  for (int i = 0; i < nx; ++i) {
    if (i == 0) {
      kstar_col[0] = 0.0;
      continue;
    }
    const double xi = dx * i;
    const ScanResult r = scan_row(a.data(), s, i);
    const double yk = (r.k == i) ? xi : dx * r.k;
    const double lo = dx * (r.k - 1 > 0 ? r.k - 1 : 0);
    const double hi = std::min(dx * (r.k + 1), xi);
    const double v = params.v();
    auto phi = [&](double y) {
      const double z = xi - y;
      return (1.0 - v * std::exp(-y)) * interp(z > 0.0 ? z : 0.0);
    };
    const MaxResult g =
        golden_max(phi, lo, hi, 1e-9 * std::max(1.0, xi));
    if (g.value > r.value || (g.value == r.value && g.y > yk))
      kstar_col[i] = g.y;
    else
      kstar_col[i] = yk;
  }
  (void)nthreads;
}

}  // namespace

void GridSpec::validate() const {
  if (!(x_max > 0.0) || !(t_max > 0.0))
    throw std::domain_error("GridSpec: x_max and t_max must be positive");
  if (t_max > 700.0)
    throw std::domain_error(
        "GridSpec: t_max capped at 700 (pbar = e^t P overflows past that)");
  if (nx < 2 || nt < 2)
    throw std::domain_error("GridSpec: nx and nt must be >= 2");
}

SolutionGrid::SolutionGrid(const GridSpec& spec, const ModelParams& params)
    : spec_(spec), params_(params),
      pbar_(static_cast<std::size_t>(spec.nx) * spec.nt, 0.0),
      kstar_(static_cast<std::size_t>(spec.nx) * spec.nt, 0.0) {}

SolutionGrid solve_integral_equation(const ModelParams& params,
                                     const GridSpec& spec) {
  spec.validate();
  const int nx = spec.nx;
  const int nt = spec.nt;
  const double dx = spec.dx();
  const double dt = spec.dt();
  const int nthreads = worker_count();

  SolutionGrid grid(spec, params);

  std::vector<double> a(nx);
  for (int i = 0; i < nx; ++i)
    a[i] = model::survival_kernel(dx * i, params);

  std::vector<double> s(nx, 1.0);  // pbar(., t_j), starts at the t=0 column
  std::vector<double> k1(nx), k2(nx), k3(nx), k4(nx), stage(nx), snew(nx);

  for (int j = 0; j < nt; ++j) {
    std::memcpy(grid.pbar_.data() + grid.idx(0, j), s.data(),
                sizeof(double) * nx);
    record_kstar(a, s.data(), nx, dx, params, spec.interp,
                 grid.kstar_.data() + grid.idx(0, j), nthreads);
    if (j == nt - 1) break;

    stage_max(a, s.data(), nx, k1.data(), nthreads);
    if (spec.scheme == Scheme::Euler) {
      for (int i = 0; i < nx; ++i) snew[i] = s[i] + dt * k1[i];
    } else {
      for (int i = 0; i < nx; ++i) stage[i] = s[i] + 0.5 * dt * k1[i];
      stage_max(a, stage.data(), nx, k2.data(), nthreads);
      for (int i = 0; i < nx; ++i) stage[i] = s[i] + 0.5 * dt * k2[i];
      stage_max(a, stage.data(), nx, k3.data(), nthreads);
      for (int i = 0; i < nx; ++i) stage[i] = s[i] + dt * k3[i];
      stage_max(a, stage.data(), nx, k4.data(), nthreads);
      for (int i = 0; i < nx; ++i)
        snew[i] =
            s[i] + dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
    for (int i = 0; i < nx; ++i) {
      if (!std::isfinite(snew[i]))
        throw numeric_error("solve_integral_equation: non-finite pbar at x=" +
                                std::to_string(dx * i) + " stepping to t=" +
                                std::to_string(dt * (j + 1)),
                            snew[i]);
    }
    s.swap(snew);
  }
  return grid;
}

MaxResult inner_max(double x, const std::function<double(double)>& pbar_slice,
                    const ModelParams& params, int scan_points) {
  if (!(x >= 0.0))
    throw std::domain_error("inner_max: x must be nonnegative");
  const double u = params.u();
  if (x == 0.0) return {0.0, u * pbar_slice(0.0)};

  const int n = std::max(3, scan_points);
  const double step = x / (n - 1);
  auto phi = [&](double y) {
    const double z = x - y;
    return model::survival_kernel(y, params) *
           pbar_slice(z > 0.0 ? z : 0.0);
  };

  double best = phi(0.0);
  int bk = 0;
  for (int k = 1; k < n; ++k) {
    const double y = (k == n - 1) ? x : step * k;
    const double m = phi(y);
    if (m >= best) {
      best = m;
      bk = k;
    }
  }
  const double yk = (bk == n - 1) ? x : step * bk;
  const double lo = step * (bk > 0 ? bk - 1 : 0);
  const double hi = std::min(step * (bk + 1), x);
  const MaxResult g = golden_max(phi, lo, hi, 1e-10 * std::max(1.0, x));
  if (g.value > best || (g.value == best && g.y > yk)) return g;
  return {yk, best};
}

namespace {

double bilinear(const SolutionGrid& grid, const std::vector<double>& field,
                const State& s) {
  const GridSpec& spec = grid.spec();
  const double dx = spec.dx();
  const double dt = spec.dt();
  if (!(s.x >= 0.0 && s.x <= spec.x_max && s.t >= 0.0 && s.t <= spec.t_max))
    throw std::domain_error("SolutionGrid lookup: state (" +
                            std::to_string(s.x) + ", " + std::to_string(s.t) +
                            ") outside the grid domain");
  int i = static_cast<int>(s.x / dx);
  if (i > spec.nx - 2) i = spec.nx - 2;
  int j = static_cast<int>(s.t / dt);
  if (j > spec.nt - 2) j = spec.nt - 2;
  const double tx = s.x / dx - i;
  const double tt = s.t / dt - j;
  const double v00 = field[grid.idx(i, j)];
  const double v10 = field[grid.idx(i + 1, j)];
  const double v01 = field[grid.idx(i, j + 1)];
  const double v11 = field[grid.idx(i + 1, j + 1)];
  return (1.0 - tt) * ((1.0 - tx) * v00 + tx * v10) +
         tt * ((1.0 - tx) * v01 + tx * v11);
}

}  // namespace

double numeric_P(const SolutionGrid& grid, const State& s) {
  const double pb = bilinear(grid, grid.pbar(), s);
  // Past t ~ 30 the e^{-t} * pbar product loses range; recover P in log space.
  if (s.t > 30.0) return std::exp(std::log(pb) - s.t);
  return std::exp(-s.t) * pb;
}

double numeric_K(const SolutionGrid& grid, const State& s) {
  return bilinear(grid, grid.kstar(), s);
}

}  // namespace bomber::solver
