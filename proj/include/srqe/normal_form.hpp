#pragma once

// Exact graded symbol algebra on the model cone and the two-step Birkhoff
// normalization.
//
// Symbols live in the spaces F_{j,k}: homogeneous of conic order j (where
// s has weight 1 and u, v weight 1/2) and divisible by a homogeneous
// (u,v)-polynomial of degree k. A term is
//
//     c(t) * s^(j - k/2) * P(u, v),     deg P = k,
//
// with c a rational polynomial in the base coordinate t conjugate to s
// ({s, t} = 1; the 4D base reduces to this canonical pair because every
// identity used below only involves {s, .} = d/dt and the grading).
// The bracket of two such terms is
//
//   {aP, bQ} = {a, b}_base P Q + a b (P_u Q_v - P_v Q_u),
//   {a, b}_base = a_s b_t - a_t b_s,
//
// mapping F_{j,k} x F_{j',k'} into F_{j+j'-1,k+k'} + F_{j+j'-1,k+k'-2}.
// Splitting F = F0 (+) Finv by the circle average (Finv = radial
// multiples of (u^2+v^2)^{k/2}, zero for odd k) gives
//
//   {H2, Finv_{j,k}} = Finv_{j+1,k+2},
//   {H2, F0_{j,k}}   = F0_{j+1,k} mod F0_{j+1,k+2},      H2 = s (u^2+v^2),
//
// which drive the two cohomological solvers below. All arithmetic is
// exact rational; grading claims are exact-zero claims. Truncation is by
// polynomial degree k (brackets only grow k here; the conic order j stays
// bookkept exactly).
//
// Canonical text form (stable order: j, then k, then t-degree, then
// descending u-power):  "<c> * t^<n> * s^<g> * u^<p> v^<q>", factors with
// zero exponent omitted, s-exponent printed as (g/2) when half-integral;
// terms joined by " + ", the zero symbol prints "0".

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

namespace srqe::nf {

using Rational = mpq_class;

// GMP rationals must be kept canonical for comparisons; route every
// numerator/denominator construction through here.
inline Rational frac(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Homogeneous polynomial in (u, v): coeffs[i] * u^{k-i} v^i.
struct HomPoly {
  int degree = 0;
  std::vector<Rational> coeffs;  // size degree+1

  static HomPoly zero(int degree);
  static HomPoly radial(int degree);  // (u^2+v^2)^{degree/2}, degree even
  bool is_zero() const;
  bool is_radial() const;  // rational multiple of radial(degree)
};

HomPoly add(const HomPoly& a, const HomPoly& b);
HomPoly scale(const HomPoly& a, const Rational& c);
HomPoly mul(const HomPoly& a, const HomPoly& b);
HomPoly du(const HomPoly& a);
HomPoly dv(const HomPoly& a);
// Angular generator A = u d/dv - v d/du.
HomPoly angular(const HomPoly& a);

// Orthogonal projection onto span{(u^2+v^2)^{k/2}} (zero for odd k):
// the circle average 1/(2 pi) Integral p(R cos, R sin) dtheta as a
// multiple of R^k, via (a-1)!!(b-1)!!/(a+b)!! moments.
HomPoly circle_average(const HomPoly& p);

// Solves (u d/dv - v d/du) q = r for average-zero r; the returned q has
// zero circle average (the solution orthogonal to ker A). Throws
// ErrorKind::domain when r has a nonzero average.
HomPoly solve_angular(const HomPoly& r);

struct GradeKey {
  int j = 0;
  int k = 0;
  bool operator<(const GradeKey& o) const { return j != o.j ? j < o.j : k < o.k; }
  bool operator==(const GradeKey& o) const { return j == o.j && k == o.k; }
};

// One graded component: sum_n t^n s^{j-k/2} by_t[n](u,v).
struct GradedTerm {
  std::vector<HomPoly> by_t;  // index = t-degree; polys all of degree k
};

struct GradedSymbol {
  std::map<GradeKey, GradedTerm> terms;
  int truncation = 16;  // max polynomial degree k retained

  bool is_zero() const { return terms.empty(); }
  void add_term(int j, int k, int t_degree, const HomPoly& p);
  void normalize();  // drops zero polys / empty grades / k > truncation
  bool operator==(const GradedSymbol& o) const;

  std::string canonical_text() const;
  // Accepts the canonical form plus shorthands: "H2", bare monomials like
  // "u3" or "u^3" (placed at conic order j = 2 by choosing the matching
  // s-power), explicit "s^(1/2)" factors, rational coefficients.
  static GradedSymbol parse(const std::string& text, int truncation = 16);
};

GradedSymbol h2(int truncation = 16);  // s (u^2 + v^2) at grade (2,2)
GradedSymbol add(const GradedSymbol& a, const GradedSymbol& b);
GradedSymbol scale(const GradedSymbol& a, const Rational& c);
GradedSymbol poisson(const GradedSymbol& f, const GradedSymbol& g);

enum class CohomSpace { zero_average, invariant };

// Inverts {H2, .} on a single-grade target:
//  - zero_average: target in F0_{j+1,k}; returns F in F0_{j,k} whose
//    bracket reproduces target modulo F0_{j+1,k+2} (division by 2s and
//    the angular solve).
//  - invariant: target in Finv_{j+1,k+2} (k even); returns F in
//    Finv_{j,k} via the t-antiderivative of the coefficient.
GradedSymbol solve_cohomological(const GradedSymbol& target, CohomSpace space);

// exp(ad_generator) applied to h: sum_n ad^n(h)/n!, exact under the k
// truncation. Throws ErrorKind::resource if the series fails to
// terminate (rotation-type generators) or max_k exceeds the cap.
GradedSymbol lie_transform(const GradedSymbol& h, const GradedSymbol& generator,
                           int max_applications = 64);

enum class NormalFormMode { semiglobal, local };

struct NormalFormResult {
  GradedSymbol normal_form;
  std::vector<GradedSymbol> generators;  // in application order
  GradedSymbol residual;                 // grades above the order (empty here)
};

// Two-step normalization of h = H2 + (grades k >= 3): the semiglobal mode
// removes every average-zero component up to `order`, leaving
// H2 + sum w_{2k}(t,s) (u^2+v^2)^k; the local mode additionally removes
// the invariant tail by t-integration, leaving H2 exactly (up to order).
NormalFormResult birkhoff_normalize(const GradedSymbol& h, int order, NormalFormMode mode);

}  // namespace srqe::nf
