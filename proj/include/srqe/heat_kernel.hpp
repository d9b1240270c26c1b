#pragma once

// Heat kernel of the flat Heisenberg sub-Laplacian and the tauberian link
// between the small-time trace and the eigenvalue counting function.
//
// The kernel at distance (x,y,z) from the origin is
//
//   H_t = (1 / (8 pi^2 t^2)) Integral_R (s/sinh s)
//           * exp(-s (x^2+y^2) / (4 t tanh s)) * cos(z s / t) ds.
//
// At the diagonal the integral is Integral_R s/sinh s ds = pi^2/2, so
// t^2 H_t = 1/16: the pointwise constant of the local Weyl law.
//
// If trace(t) ~ c/t^2 as t -> 0+, the counting function obeys
// N(lambda) ~ (c / Gamma(3)) lambda^2 = (c/2) lambda^2 (Karamata), since
// Integral_0^inf e^{-u} u^2 du / 2! = 1 fixes the conversion constant.

#include <functional>

namespace srqe::heat {

enum class QuadScheme { gauss_legendre, tanh_sinh };

struct QuadratureSpec {
  double truncation = 0.0;  // half-line cutoff S actually used
  int nodes = 0;            // total evaluation points
  QuadScheme scheme = QuadScheme::gauss_legendre;
};

// Evaluates the kernel with absolute error <= tol * (1 + 1/t^2)/(8 pi^2).
// The integrand decays like 2 s e^{-s}; truncation S is chosen from
// (S+1) e^{-S} < tol and refined panels handle the cos(z s/t) oscillation.
// Refuses (ErrorKind::numeric) when |z|/t exceeds the resolvable bound.
double gaveau_kernel(double x, double y, double z, double t, double tol = 1e-10,
                     QuadScheme scheme = QuadScheme::gauss_legendre,
                     QuadratureSpec* used = nullptr);

struct KaramataFit {
  double c = 0.0;        // trace(t) ~ c / t^2
  double r2 = 1.0;       // quality of the constrained fit
  bool poor_fit = false; // r2 < 0.999: the 1/t^2 power law does not hold
  // Implied Weyl constant: N(lambda) ~ (c/2) lambda^2.
  double weyl_constant() const { return 0.5 * c; }
};

// Fits trace(t) ~ c/t^2 on a geometric grid of n_pts in [t_lo, t_hi].
KaramataFit karamata_constant(const std::function<double(double)>& trace_fn, double t_lo,
                              double t_hi, int n_pts = 16);

}  // namespace srqe::heat
