#pragma once

// Hamiltonian geodesic flow of g* = h_X^2 + h_Y^2 on the cotangent bundle,
// Reeb flow on the base, and the adiabatic-invariant experiment.
//
// Momenta: with X = (1+eps a) d/dx and Y = (1+eps b)(d/dy - x d/dz),
//   h_X = (1+eps a) p_x,     h_Y = (1+eps b)(p_y - x p_z),
//   h_Z = -F_y p_x + F_x (p_y - x p_z) + F p_z,   F = (1+eps a)(1+eps b).
//
// Flat closed form (eps = 0): p_z is conserved, h_X + i h_Y rotates
// rigidly at rate -2 p_z while x + i y traces a circle of radius
// sqrt(g*)/|p_z|; z advances accordingly. The adiabatic invariant is
//   I = (h_X^2 + h_Y^2) / |h_Z| = u^2 + v^2,
// homogeneous of degree one in p and exactly conserved on the flat model.
//
// Sign convention: the base bracket is fixed by d(h_X)/dt = +2 h_Y h_Z on
// the flat flow of g*; orientation statements hold up to this global sign.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "srqe/contact_model.hpp"

namespace srqe::flow {

struct PhasePoint {
  std::array<double, 3> q{0.0, 0.0, 0.0};
  std::array<double, 3> p{0.0, 0.0, 0.0};
};

struct Momenta {
  double hX = 0.0, hY = 0.0, hZ = 0.0;
  double gstar = 0.0;
  std::optional<double> invariant;  // I = gstar/|hZ|, absent when |hZ| < 1e-10
};

Momenta momenta(const ContactModel& model, const PhasePoint& pt);

// Hamiltonian vector field of g*: returns (dq/dt, dp/dt).
std::array<double, 6> geodesic_vector_field(const ContactModel& model, const PhasePoint& pt);

// Reeb field on the base (p untouched; the flow preserves the Popp measure).
std::array<double, 3> reeb_vector_field(const ContactModel& model, const std::array<double, 3>& q);

enum class FlowKind { geodesic, reeb };
enum class Scheme { rk4, implicit_midpoint };

struct TrajectorySample {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<double> gstar;
  std::vector<std::optional<double>> invariant;
};

// Fixed-step integration; sample_stride controls how many steps separate
// stored samples (1 = every step). Throws ErrorKind::resource when
// T/dt exceeds step_cap.
TrajectorySample integrate(const ContactModel& model, FlowKind kind, const PhasePoint& start,
                           double T, double dt, Scheme scheme, int sample_stride = 1,
                           std::int64_t step_cap = 40'000'000);

// Closed-form flat geodesic (oracle for the integrator).
PhasePoint flat_geodesic_exact(const PhasePoint& start, double t);

// Builds a start point with prescribed invariant I0 and h_Z = 1 at angle
// theta in the (h_X, h_Y) plane.
PhasePoint start_with_invariant(const ContactModel& model, const std::array<double, 3>& q,
                                double I0, double theta);

struct SpiralRun {
  double epsilon = 0.0;
  double sup_deviation = 0.0;  // sup_t |I(t) - I0|
  bool truncated = false;      // trajectory left the chart |hZ - 1| > 0.5
};

struct SpiralReport {
  std::vector<SpiralRun> runs;
  double slope = 0.0;  // log-log slope of sup deviation vs epsilon
};

// For each eps: model with that perturbation strength, start with
// I0 = i0(eps), horizon T = 1/eps; records sup |I - I0|.
SpiralReport adiabatic_experiment(const ContactModel& base, const std::vector<double>& epsilons,
                                  const std::function<double(double)>& i0_of_eps, double dt = 1e-3,
                                  double theta = 0.3);

// Running Birkhoff averages of the observable along the flow, reported at
// checkpoints T/10, 2T/10, ..., T.
std::vector<std::pair<double, double>> birkhoff_average(
    const ContactModel& model, FlowKind kind, const PhasePoint& start,
    const std::function<double(const std::array<double, 3>&)>& observable, double T, double dt,
    int checkpoints = 10);

// Determinant of the time-T Reeb flow Jacobian, weighted by the Popp
// density ratio: equals 1 for a measure-preserving flow.
double reeb_flow_measure_jacobian(const ContactModel& model, const std::array<double, 3>& q0,
                                  double T, double dt);

}  // namespace srqe::flow
