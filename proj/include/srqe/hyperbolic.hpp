#pragma once

// Geodesic flow on a genus-2 hyperbolic surface (Bolza octagon group),
// realized on SL(2,R): the unit tangent bundle is Gamma \ SL(2,R), the
// flow is right multiplication by diag(e^{t/2}, e^{-t/2}), and reduction
// to the Dirichlet fundamental domain is by greedy generator application.
//
// The group is generated by the eight disk-model matrices
//   g_k = [ 1+sqrt(2),            sqrt(2+2 sqrt 2) e^{i k pi/4} ]
//         [ sqrt(2+2 sqrt 2) e^{-i k pi/4},          1+sqrt(2)  ]
// in SU(1,1) (k = 0..7, g_{k+4} = g_k^{-1}), conjugated to SL(2,R) by the
// Cayley map w = (z - i)/(z + i). The Dirichlet domain centered at i is
// the regular hyperbolic octagon of area 4 pi.

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace srqe::hyp {

struct HyperbolicState {
  // Row-major 2x2 real matrix, det = 1 (renormalized on reduction).
  std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};

  double det() const { return m[0] * m[3] - m[1] * m[2]; }
  void renormalize();
};

HyperbolicState multiply(const HyperbolicState& a, const HyperbolicState& b);

// Base point g * i in the upper half-plane, and its disk-model image.
std::complex<double> base_point(const HyperbolicState& g);
std::complex<double> to_disk(std::complex<double> z_uhp);
double dist_uhp(std::complex<double> z1, std::complex<double> z2);

// The eight Bolza side-pairing generators (closed under inverses).
const std::vector<HyperbolicState>& bolza_generators();

// Distance from the domain center i at which the octagon's vertices sit
// (circumradius) and the side-bisector distance (inradius).
double bolza_inradius();
double bolza_circumradius();

// True iff the base point lies in the closed Dirichlet domain:
// d(z, i) <= d(z, g_k * i) for every generator.
bool in_dirichlet_domain(std::complex<double> z_uhp, double slack = 1e-12);

// Greedy reduction: left-multiplies by the generator that most decreases
// the base point's distance to i; terminates with the base point in the
// closed domain. Throws ErrorKind::numeric after max_steps applications.
HyperbolicState reduce(const HyperbolicState& g, int max_steps = 1000);

// Geodesic flow step: g -> g * diag(e^{dt/2}, e^{-dt/2}).
HyperbolicState geodesic_advance(const HyperbolicState& g, double dt);

// State with base point z0 (uhp) and unit direction theta (theta = 0
// points along the imaginary axis at i).
HyperbolicState state_at(std::complex<double> z0, double theta);

struct BirkhoffCurve {
  std::vector<double> times;
  std::vector<double> averages;
};

// Running time averages of indicator(z_disk_of_reduced_point).
BirkhoffCurve geodesic_birkhoff_average(const HyperbolicState& start,
                                        const std::function<double(std::complex<double>)>& observable,
                                        double T, double dt, int checkpoints = 10);

}  // namespace srqe::hyp
