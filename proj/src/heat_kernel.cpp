#include "srqe/heat_kernel.hpp"

#include <cmath>
#include <vector>

#include "srqe/errors.hpp"
#include "srqe/util.hpp"

namespace srqe::heat {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// s/sinh(s), continuous at 0.
double s_over_sinh(double s) {
  if (std::abs(s) < 1e-8) return 1.0 - s * s / 6.0;
  return s / std::sinh(s);
}

// s/tanh(s), continuous at 0.
double s_over_tanh(double s) {
  if (std::abs(s) < 1e-8) return 1.0 + s * s / 3.0;
  return s / std::tanh(s);
}

double integrand(double s, double r2_over_4t, double z_over_t) {
  return s_over_sinh(s) * std::exp(-r2_over_4t * s_over_tanh(s)) * std::cos(z_over_t * s);
}

double integrate_gl(double S, int panels, double r2_over_4t, double z_over_t, int* nodes) {
  // Pairwise-summed fixed panel sweep: deterministic regardless of threads.
  std::vector<double> partial(panels);
  util::parallel_for(
      static_cast<std::size_t>(panels),
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t pnl = lo; pnl < hi; ++pnl) {
          double a = S * static_cast<double>(pnl) / panels;
          double b = S * static_cast<double>(pnl + 1) / panels;
          double half = 0.5 * (b - a), mid = 0.5 * (a + b);
          double acc = 0.0;
          for (int i = 0; i < kGL; ++i)
            acc += kGLw[i] * integrand(mid + half * kGLx[i], r2_over_4t, z_over_t);
          partial[pnl] = acc * half;
        }
      },
      0);
  double total = 0.0;
  for (double v : partial) total += v;
  if (nodes) *nodes += panels * kGL;
  return total;
}

double integrate_ts(double S, int level, double r2_over_4t, double z_over_t, int* nodes) {
  // tanh-sinh on [0, S] mapped from (-1, 1); fixed level, symmetric sweep.
  double h = std::pow(2.0, -level);
  double acc = 0.0;
  int n = 0;
  for (int k = -static_cast<int>(6.0 / h); k <= static_cast<int>(6.0 / h); ++k) {
    double u = k * h;
    double sh = std::sinh(u);
    double w = (0.5 * M_PI) * std::cosh(u) / std::pow(std::cosh(0.5 * M_PI * sh), 2);
    double x = std::tanh(0.5 * M_PI * sh);  // in (-1, 1)
    double s = 0.5 * S * (x + 1.0);
    acc += w * integrand(s, r2_over_4t, z_over_t);
    ++n;
  }
  if (nodes) *nodes += n;
  return acc * h * 0.5 * S;
}

}  // namespace

double gaveau_kernel(double x, double y, double z, double t, double tol, QuadScheme scheme,
                     QuadratureSpec* used) {
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "gaveau_kernel: t must be > 0");
  if (!(tol > 0.0)) throw Error(ErrorKind::domain, "gaveau_kernel: tol must be > 0");

  const double z_over_t = z / t;
  constexpr double kMaxOscillation = 200.0;
  if (std::abs(z_over_t) > kMaxOscillation)
    throw Error(ErrorKind::numeric,
                "gaveau_kernel: |z|/t = " + util::fmt17(std::abs(z_over_t)) +
                    " oscillates beyond the configured bound " + util::fmt17(kMaxOscillation));

  const double r2_over_4t = (x * x + y * y) / (4.0 * t);

  // Truncation from the envelope |integrand| <= 2 s e^{-s} (s >= 1):
  // integral over [S, inf) <= 2 (S+1) e^{-S}.
  double S = 2.0;
  while (2.0 * (S + 1.0) * std::exp(-S) > 0.125 * tol && S < 800.0) S += 1.0;

  QuadratureSpec spec;
  spec.truncation = S;
  spec.scheme = scheme;

  // Resolve both the e^{-s} scale and the oscillation; refine until stable.
  double value = 0.0;
  if (scheme == QuadScheme::gauss_legendre) {
    int panels = std::max(8, static_cast<int>(S * (1.0 + std::abs(z_over_t) / (2.0 * M_PI))));
    double prev = integrate_gl(S, panels, r2_over_4t, z_over_t, &spec.nodes);
    for (int it = 0; it < 12; ++it) {
      panels *= 2;
      value = integrate_gl(S, panels, r2_over_4t, z_over_t, &spec.nodes);
      if (std::abs(value - prev) <= 0.125 * tol) break;
      prev = value;
    }
  } else {
    int level = 6;
    double prev = integrate_ts(S, level, r2_over_4t, z_over_t, &spec.nodes);
    for (int it = 0; it < 6; ++it) {
      ++level;
      value = integrate_ts(S, level, r2_over_4t, z_over_t, &spec.nodes);
      if (std::abs(value - prev) <= 0.125 * tol) break;
      prev = value;
    }
  }

  if (used) *used = spec;
  // Even integrand: integral over R is twice the half-line value.
  return 2.0 * value / (8.0 * M_PI * M_PI * t * t);
}

KaramataFit karamata_constant(const std::function<double(double)>& trace_fn, double t_lo,
                              double t_hi, int n_pts) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) throw Error(ErrorKind::domain, "karamata_constant: need 0 < t_lo < t_hi");
  if (n_pts < 4) throw Error(ErrorKind::domain, "karamata_constant: need >= 4 points");

  std::vector<double> logt(n_pts), logtr(n_pts);
  double ratio = std::pow(t_hi / t_lo, 1.0 / (n_pts - 1));
  double t = t_lo;
  for (int i = 0; i < n_pts; ++i, t *= ratio) {
    double tr = trace_fn(t);
    if (!(tr > 0.0)) throw Error(ErrorKind::domain, "karamata_constant: trace must be positive");
    logt[i] = std::log(t);
    logtr[i] = std::log(tr);
  }

  // Constrained model log trace = log c - 2 log t; c from the geometric
  // mean of t^2 trace(t), r^2 measured against that model.
  double mean = 0.0;
  for (int i = 0; i < n_pts; ++i) mean += logtr[i] + 2.0 * logt[i];
  mean /= n_pts;

  double ss_res = 0.0, ss_tot = 0.0, ybar = 0.0;
  for (int i = 0; i < n_pts; ++i) ybar += logtr[i];
  ybar /= n_pts;
  for (int i = 0; i < n_pts; ++i) {
    double fit = mean - 2.0 * logt[i];
    ss_res += (logtr[i] - fit) * (logtr[i] - fit);
    ss_tot += (logtr[i] - ybar) * (logtr[i] - ybar);
  }

  KaramataFit out;
  out.c = std::exp(mean);
  out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  out.poor_fit = out.r2 < 0.999;
  return out;
}

}  // namespace srqe::heat
