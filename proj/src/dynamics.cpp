#include "srqe/dynamics.hpp"

#include <cmath>
#include <complex>

#include "srqe/errors.hpp"
#include "srqe/util.hpp"

namespace srqe::flow {

namespace {

// State vector layout for the integrators.
using State6 = std::array<double, 6>;
using State3 = std::array<double, 3>;

PhasePoint to_point(const State6& s) { return {{s[0], s[1], s[2]}, {s[3], s[4], s[5]}}; }
State6 to_state(const PhasePoint& pt) {
  return {pt.q[0], pt.q[1], pt.q[2], pt.p[0], pt.p[1], pt.p[2]};
}

}  // namespace

Momenta momenta(const ContactModel& model, const PhasePoint& pt) {
  const double x = pt.q[0], y = pt.q[1];
  const double px = pt.p[0], py = pt.p[1], pz = pt.p[2];
  double fa = model.frame_a(x, y), fb = model.frame_b(x, y);
  double w = py - x * pz;

  Momenta m;
  m.hX = fa * px;
  m.hY = fb * w;
  double z[3];
  model.reeb(x, y, z);
  m.hZ = z[0] * px + z[1] * py + z[2] * pz;
  m.gstar = m.hX * m.hX + m.hY * m.hY;
  if (std::abs(m.hZ) >= 1e-10) m.invariant = m.gstar / std::abs(m.hZ);
  return m;
}

std::array<double, 6> geodesic_vector_field(const ContactModel& model, const PhasePoint& pt) {
  const double Lx = model.lattice.Lx, Ly = model.lattice.Ly;
  const double x = pt.q[0], y = pt.q[1];
  const double px = pt.p[0], py = pt.p[1], pz = pt.p[2];

  double fa = model.frame_a(x, y), fb = model.frame_b(x, y);
  double fa_x = model.epsilon * model.coeff_a.dx(x, y, Lx, Ly);
  double fa_y = model.epsilon * model.coeff_a.dy(x, y, Lx, Ly);
  double fb_x = model.epsilon * model.coeff_b.dx(x, y, Lx, Ly);
  double fb_y = model.epsilon * model.coeff_b.dy(x, y, Lx, Ly);
  double w = py - x * pz;

  // g* = fa^2 px^2 + fb^2 w^2, Hamilton's equations for omega = dq ^ dp.
  std::array<double, 6> d;
  d[0] = 2.0 * fa * fa * px;        // dx/dt
  d[1] = 2.0 * fb * fb * w;         // dy/dt
  d[2] = -2.0 * fb * fb * w * x;    // dz/dt
  d[3] = -(2.0 * fa * fa_x * px * px + 2.0 * fb * fb_x * w * w) + 2.0 * fb * fb * w * pz;  // dpx/dt
  d[4] = -(2.0 * fa * fa_y * px * px + 2.0 * fb * fb_y * w * w);                           // dpy/dt
  d[5] = 0.0;                       // z-independent model
  return d;
}

std::array<double, 3> reeb_vector_field(const ContactModel& model, const std::array<double, 3>& q) {
  double z[3];
  model.reeb(q[0], q[1], z);
  return {z[0], z[1], z[2]};
}

namespace {

template <std::size_t N>
std::array<double, N> rk4_step(const std::function<std::array<double, N>(const std::array<double, N>&)>& f,
                               const std::array<double, N>& s, double dt) {
  auto k1 = f(s);
  std::array<double, N> t;
  for (std::size_t i = 0; i < N; ++i) t[i] = s[i] + 0.5 * dt * k1[i];
  auto k2 = f(t);
  for (std::size_t i = 0; i < N; ++i) t[i] = s[i] + 0.5 * dt * k2[i];
  auto k3 = f(t);
  for (std::size_t i = 0; i < N; ++i) t[i] = s[i] + dt * k3[i];
  auto k4 = f(t);
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

template <std::size_t N>
std::array<double, N> midpoint_step(
    const std::function<std::array<double, N>(const std::array<double, N>&)>& f,
    const std::array<double, N>& s, double dt) {
  // Solve m = s + (dt/2) f(m) by fixed-point iteration; the implicit
  // midpoint rule is symplectic, so g* shows no secular drift.
  std::array<double, N> m = s;
  auto k = f(s);
  for (std::size_t i = 0; i < N; ++i) m[i] = s[i] + 0.5 * dt * k[i];
  for (int it = 0; it < 64; ++it) {
    k = f(m);
    double diff = 0.0;
    std::array<double, N> mn;
    for (std::size_t i = 0; i < N; ++i) {
      mn[i] = s[i] + 0.5 * dt * k[i];
      diff = std::max(diff, std::abs(mn[i] - m[i]));
    }
    m = mn;
    if (diff < 1e-15) break;
  }
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = 2.0 * m[i] - s[i];
  return out;
}

}  // namespace

TrajectorySample integrate(const ContactModel& model, FlowKind kind, const PhasePoint& start,
                           double T, double dt, Scheme scheme, int sample_stride,
                           std::int64_t step_cap) {
  if (!(dt > 0.0) || !(T > 0.0)) throw Error(ErrorKind::domain, "integrate: need T, dt > 0");
  std::int64_t steps = static_cast<std::int64_t>(std::llround(T / dt));
  if (steps < 1) steps = 1;
  if (steps > step_cap)
    throw Error(ErrorKind::resource, "integrate: " + std::to_string(steps) + " steps exceed the cap");
  if (sample_stride < 1) sample_stride = 1;

  TrajectorySample out;
  out.times.reserve(steps / sample_stride + 2);

  auto push = [&](double t, const PhasePoint& pt) {
    out.times.push_back(t);
    out.states.push_back(pt);
    auto m = momenta(model, pt);
    out.gstar.push_back(m.gstar);
    out.invariant.push_back(m.invariant);
  };

  if (kind == FlowKind::geodesic) {
    std::function<State6(const State6&)> f = [&](const State6& s) {
      return geodesic_vector_field(model, to_point(s));
    };
    State6 s = to_state(start);
    push(0.0, start);
    for (std::int64_t i = 1; i <= steps; ++i) {
      s = (scheme == Scheme::rk4) ? rk4_step<6>(f, s, dt) : midpoint_step<6>(f, s, dt);
      if (i % sample_stride == 0 || i == steps) push(i * dt, to_point(s));
    }
  } else {
    std::function<State3(const State3&)> f = [&](const State3& q) {
      return reeb_vector_field(model, q);
    };
    State3 q{start.q[0], start.q[1], start.q[2]};
    PhasePoint pt = start;
    push(0.0, pt);
    for (std::int64_t i = 1; i <= steps; ++i) {
      q = (scheme == Scheme::rk4) ? rk4_step<3>(f, q, dt) : midpoint_step<3>(f, q, dt);
      if (i % sample_stride == 0 || i == steps) {
        pt.q = q;
        push(i * dt, pt);
      }
    }
  }
  return out;
}

PhasePoint flat_geodesic_exact(const PhasePoint& start, double t) {
  const double px0 = start.p[0], py0 = start.p[1], pz = start.p[2];
  const double x0 = start.q[0], y0 = start.q[1], z0 = start.q[2];
  const double w0 = py0 - x0 * pz;  // h_Y at t = 0

  PhasePoint out = start;
  if (std::abs(pz) < 1e-300) {
    // Straight line: h constant.
    out.q[0] = x0 + 2.0 * px0 * t;
    out.q[1] = y0 + 2.0 * w0 * t;
    // dz/dt = -2 w x(t)
    out.q[2] = z0 - 2.0 * w0 * (x0 * t + px0 * t * t);
    out.p = {px0, py0, pz};
    return out;
  }

  // h(t) = h0 e^{-2 i pz t}, (x + i y)' = 2 h.
  std::complex<double> h0(px0, w0);
  std::complex<double> rot = std::exp(std::complex<double>(0.0, -2.0 * pz * t));
  std::complex<double> h = h0 * rot;
  std::complex<double> xy0(x0, y0);
  std::complex<double> xy = xy0 + (h0 / std::complex<double>(0.0, pz)) * (1.0 - rot);
  out.q[0] = xy.real();
  out.q[1] = xy.imag();

  // z(t) = z0 - 2 Integral_0^t hY(s) x(s) ds, done in closed form:
  //   x(s) = Re(xy(s)), hY(s) = Im(h(s)).
  // Write xy(s) = C + R e^{-2 i pz s}, with C = xy0 + i h0/pz, R = -i h0/pz.
  std::complex<double> C = xy0 + h0 / std::complex<double>(0.0, pz);
  std::complex<double> R = -h0 / std::complex<double>(0.0, pz);
  // hY(s) x(s) = Im(h0 e^{-2ipz s}) * Re(C + R e^{-2ipz s}); expand with
  // e^{-2ipz s} = c - i*s_ (c = cos(2 pz s), s_ = sin(2 pz s)).
  // Using h0 = hx0 + i hy0, R = Rr + i Ri, C = Cr + i Ci:
  const double hx0 = h0.real(), hy0 = h0.imag();
  const double Rr = R.real(), Ri = R.imag(), Cr = C.real();
  const double a = 2.0 * pz;
  // Im(h0 e^{-ias}) = hy0 cos(as) - hx0 sin(as)
  // Re(R e^{-ias}) = Rr cos(as) + Ri sin(as)
  // product with Cr: Cr(hy0 c - hx0 s)
  // product with R-part: hy0 Rr c^2 - hx0 Ri s^2 + (hy0 Ri - hx0 Rr) s c
  auto F = [&](double s) {
    // Primitives of cos, sin, cos^2, sin^2, sin*cos at frequency a.
    double Ic = std::sin(a * s) / a;
    double Is = (1.0 - std::cos(a * s)) / a;
    double Ic2 = 0.5 * s + std::sin(2.0 * a * s) / (4.0 * a);
    double Is2 = 0.5 * s - std::sin(2.0 * a * s) / (4.0 * a);
    double Isc = (1.0 - std::cos(2.0 * a * s)) / (4.0 * a);
    return Cr * (hy0 * Ic - hx0 * Is) + hy0 * Rr * Ic2 - hx0 * Ri * Is2 +
           (hy0 * Ri - hx0 * Rr) * Isc;
  };
  out.q[2] = z0 - 2.0 * (F(t) - F(0.0));

  out.p[0] = h.real();               // flat: px = hX
  out.p[2] = pz;
  out.p[1] = h.imag() + xy.real() * pz;  // py = hY + x pz
  return out;
}

PhasePoint start_with_invariant(const ContactModel& model, const std::array<double, 3>& q,
                                double I0, double theta) {
  if (!(I0 >= 0.0)) throw Error(ErrorKind::domain, "start_with_invariant: I0 must be >= 0");
  const double x = q[0], y = q[1];
  double fa = model.frame_a(x, y), fb = model.frame_b(x, y);
  double hX = std::sqrt(I0) * std::cos(theta);
  double hY = std::sqrt(I0) * std::sin(theta);

  PhasePoint pt;
  pt.q = q;
  double px = hX / fa;
  double w = hY / fb;
  // Solve hZ = -Fy px + Fx w + F pz = 1 for pz.
  double z[3];
  model.reeb(x, y, z);  // z = (-Fy, Fx, F - x Fx)
  double Fy = -z[0], Fx = z[1];
  double F = z[2] + x * Fx;
  double pz = (1.0 + Fy * px - Fx * w) / F;
  pt.p = {px, w + x * pz, pz};
  return pt;
}

SpiralReport adiabatic_experiment(const ContactModel& base, const std::vector<double>& epsilons,
                                  const std::function<double(double)>& i0_of_eps, double dt,
                                  double theta) {
  SpiralReport report;
  std::vector<double> le, ld;
  for (double eps : epsilons) {
    ContactModel model = base;
    model.epsilon = eps;
    model.validate();

    double I0 = i0_of_eps(eps);
    PhasePoint start = start_with_invariant(model, {0.3, 0.4, 0.0}, I0, theta);
    double T = (eps > 0.0) ? 1.0 / eps : 1.0;

    SpiralRun run;
    run.epsilon = eps;
    auto traj = integrate(model, FlowKind::geodesic, start, T, dt, Scheme::rk4, 4);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      auto m = momenta(model, traj.states[i]);
      if (std::abs(m.hZ - 1.0) > 0.5) {
        run.truncated = true;
        break;
      }
      if (m.invariant)
        run.sup_deviation = std::max(run.sup_deviation, std::abs(*m.invariant - I0));
    }
    report.runs.push_back(run);
    if (eps > 0.0 && run.sup_deviation > 0.0 && !run.truncated) {
      le.push_back(std::log(eps));
      ld.push_back(std::log(run.sup_deviation));
    }
  }
  if (le.size() >= 2) report.slope = util::fit_line(le, ld).slope;
  return report;
}

std::vector<std::pair<double, double>> birkhoff_average(
    const ContactModel& model, FlowKind kind, const PhasePoint& start,
    const std::function<double(const std::array<double, 3>&)>& observable, double T, double dt,
    int checkpoints) {
  auto traj = integrate(model, kind, start, T, dt, Scheme::rk4, 1);
  std::vector<std::pair<double, double>> out;
  out.reserve(checkpoints);
  double acc = 0.0;
  std::size_t idx = 1;  // trapezoid accumulation over samples
  double prev = observable(traj.states[0].q);
  for (int c = 1; c <= checkpoints; ++c) {
    double t_end = T * c / checkpoints;
    while (idx < traj.times.size() && traj.times[idx] <= t_end + 1e-12) {
      double cur = observable(traj.states[idx].q);
      acc += 0.5 * (prev + cur) * (traj.times[idx] - traj.times[idx - 1]);
      prev = cur;
      ++idx;
    }
    double t_done = traj.times[idx - 1];
    out.emplace_back(t_end, t_done > 0.0 ? acc / t_done : prev);
  }
  return out;
}

double reeb_flow_measure_jacobian(const ContactModel& model, const std::array<double, 3>& q0,
                                  double T, double dt) {
  // Variational integration of dJ/dt = DZ(q) J alongside dq/dt = Z(q).
  std::array<double, 12> s{};  // q (3) + J row-major (9)
  s[0] = q0[0];
  s[1] = q0[1];
  s[2] = q0[2];
  s[3] = s[7] = s[11] = 1.0;

  std::function<std::array<double, 12>(const std::array<double, 12>&)> f =
      [&](const std::array<double, 12>& u) {
        std::array<double, 12> d{};
        double z[3], dz[9];
        model.reeb(u[0], u[1], z);
        model.reeb_jacobian(u[0], u[1], dz);
        d[0] = z[0];
        d[1] = z[1];
        d[2] = z[2];
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += dz[3 * r + k] * u[3 + 3 * k + c];
            d[3 + 3 * r + c] = acc;
          }
        return d;
      };

  std::int64_t steps = static_cast<std::int64_t>(std::llround(T / dt));
  for (std::int64_t i = 0; i < steps; ++i) s = rk4_step<12>(f, s, dt);

  double det = s[3] * (s[7] * s[11] - s[8] * s[10]) - s[4] * (s[6] * s[11] - s[8] * s[9]) +
               s[5] * (s[6] * s[10] - s[7] * s[9]);
  // Popp weight ratio: the flow preserves popp_weight * dx dy dz.
  double w0 = model.popp_weight(q0[0], q0[1]);
  double wT = model.popp_weight(s[0], s[1]);
  return det * wT / w0;
}

}  // namespace srqe::flow
