#include "srqe/hyperbolic.hpp"

#include <cmath>
#include <functional>
#include <mutex>

#include "srqe/errors.hpp"

namespace srqe::hyp {

void HyperbolicState::renormalize() {
  double d = det();
  if (d <= 0.0) throw Error(ErrorKind::numeric, "HyperbolicState: determinant collapsed");
  double s = 1.0 / std::sqrt(d);
  for (auto& v : m) v *= s;
}

HyperbolicState multiply(const HyperbolicState& a, const HyperbolicState& b) {
  HyperbolicState c;
  c.m[0] = a.m[0] * b.m[0] + a.m[1] * b.m[2];
  c.m[1] = a.m[0] * b.m[1] + a.m[1] * b.m[3];
  c.m[2] = a.m[2] * b.m[0] + a.m[3] * b.m[2];
  c.m[3] = a.m[2] * b.m[1] + a.m[3] * b.m[3];
  return c;
}

std::complex<double> base_point(const HyperbolicState& g) {
  std::complex<double> i(0.0, 1.0);
  return (g.m[0] * i + g.m[1]) / (g.m[2] * i + g.m[3]);
}

std::complex<double> to_disk(std::complex<double> z) {
  std::complex<double> i(0.0, 1.0);
  return (z - i) / (z + i);
}

double dist_uhp(std::complex<double> z1, std::complex<double> z2) {
  double num = std::norm(z1 - z2);
  double den = 2.0 * z1.imag() * z2.imag();
  return std::acosh(1.0 + num / den);
}

namespace {

std::vector<HyperbolicState> build_bolza_generators() {
  // Disk-model SU(1,1) generators, conjugated to SL(2,R) by the Cayley
  // matrix for w = (z - i)/(z + i). The conjugation is computed in
  // complex arithmetic; the result is real to rounding, which we verify
  // and then clean.
  using C = std::complex<double>;
  const double alpha = 1.0 + std::sqrt(2.0);
  const double beta = std::sqrt(2.0 + 2.0 * std::sqrt(2.0));
  const C i(0.0, 1.0);

  // Cayley: w = (z - i)/(z + i)  ->  M = [[1, -i], [1, i]] / sqrt(2 i)
  const C s = std::sqrt(C(0.0, 2.0));
  const C M11 = 1.0 / s, M12 = -i / s, M21 = 1.0 / s, M22 = i / s;
  // inverse of the det-1 matrix [[a,b],[c,d]]: [[d,-b],[-c,a]]
  const C W11 = M22, W12 = -M12, W21 = -M21, W22 = M11;

  std::vector<HyperbolicState> gens;
  for (int k = 0; k < 8; ++k) {
    C b = beta * std::exp(i * (M_PI * k / 4.0));
    // SU(1,1) element [[alpha, b], [conj(b), alpha]]
    C g11 = alpha, g12 = b, g21 = std::conj(b), g22 = alpha;
    // W * g * M
    C t11 = W11 * g11 + W12 * g21, t12 = W11 * g12 + W12 * g22;
    C t21 = W21 * g11 + W22 * g21, t22 = W21 * g12 + W22 * g22;
    C r11 = t11 * M11 + t12 * M21, r12 = t11 * M12 + t12 * M22;
    C r21 = t21 * M11 + t22 * M21, r22 = t21 * M12 + t22 * M22;
    double im = std::max(std::max(std::abs(r11.imag()), std::abs(r12.imag())),
                         std::max(std::abs(r21.imag()), std::abs(r22.imag())));
    if (im > 1e-12)
      throw Error(ErrorKind::numeric, "bolza_generators: Cayley conjugation left imaginary parts");
    HyperbolicState h;
    h.m = {r11.real(), r12.real(), r21.real(), r22.real()};
    h.renormalize();
    gens.push_back(h);
  }
  return gens;
}

}  // namespace

const std::vector<HyperbolicState>& bolza_generators() {
  static std::vector<HyperbolicState> gens;
  static std::once_flag once;
  std::call_once(once, [] { gens = build_bolza_generators(); });
  return gens;
}

double bolza_inradius() {
  // Half the translation distance d(i, g i): cosh d = 2 (1+sqrt 2)^2 - 1.
  const auto& g = bolza_generators();
  static const double r = 0.5 * dist_uhp(std::complex<double>(0.0, 1.0), base_point(g[0]));
  return r;
}

double bolza_circumradius() {
  // Vertex = intersection of adjacent side bisectors; by symmetry it sits
  // at disk angle pi/8 between the k=0 and k=1 translates. Bisect the
  // distance functions numerically along that ray.
  const auto& gens = bolza_generators();
  std::complex<double> i(0.0, 1.0);
  std::complex<double> c0 = base_point(gens[0]);
  double lo = bolza_inradius(), hi = 3.0;
  auto on_ray = [&](double rho) {
    // Disk point at hyperbolic radius rho, angle pi/8; back to uhp.
    double er = std::tanh(0.5 * rho);
    std::complex<double> w = er * std::exp(std::complex<double>(0.0, M_PI / 8.0));
    return std::complex<double>(0.0, 1.0) * (1.0 + w) / (1.0 - w);
  };
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    auto z = on_ray(mid);
    double d0 = dist_uhp(z, i);
    double dg = dist_uhp(z, c0);
    if (d0 < dg)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool in_dirichlet_domain(std::complex<double> z, double slack) {
  std::complex<double> i(0.0, 1.0);
  double d0 = dist_uhp(z, i);
  for (const auto& g : bolza_generators())
    if (d0 > dist_uhp(z, base_point(g)) + slack) return false;
  return true;
}

HyperbolicState reduce(const HyperbolicState& g, int max_steps) {
  HyperbolicState cur = g;
  std::complex<double> i(0.0, 1.0);
  const auto& gens = bolza_generators();
  for (int step = 0; step < max_steps; ++step) {
    std::complex<double> z = base_point(cur);
    double best = dist_uhp(z, i);
    int best_k = -1;
    for (std::size_t k = 0; k < gens.size(); ++k) {
      // gamma^{-1} moves the base point of gamma to i, so distances to
      // translates tell which application shrinks d(., i). g_{k+4} is the
      // inverse of g_k, hence left-multiplying by gens[(k+4)%8] pulls the
      // point toward the k-th side.
      double cand = dist_uhp(z, base_point(gens[k]));
      if (cand < best - 1e-13) {
        best = cand;
        best_k = static_cast<int>(k);
      }
    }
    if (best_k < 0) return cur;  // in the closed Dirichlet domain
    cur = multiply(gens[(best_k + 4) % 8], cur);
    cur.renormalize();
  }
  throw Error(ErrorKind::numeric, "hyperbolic reduce: no termination (bad generator set?)");
}

HyperbolicState geodesic_advance(const HyperbolicState& g, double dt) {
  HyperbolicState a;
  a.m = {std::exp(0.5 * dt), 0.0, 0.0, std::exp(-0.5 * dt)};
  return multiply(g, a);
}

HyperbolicState state_at(std::complex<double> z0, double theta) {
  double y = z0.imag();
  if (!(y > 0.0)) throw Error(ErrorKind::domain, "state_at: point must be in the upper half-plane");
  HyperbolicState t;  // translate i -> z0
  double sy = std::sqrt(y);
  t.m = {sy, z0.real() / sy, 0.0, 1.0 / sy};
  HyperbolicState r;  // rotation stabilizing i
  r.m = {std::cos(0.5 * theta), -std::sin(0.5 * theta), std::sin(0.5 * theta), std::cos(0.5 * theta)};
  return multiply(t, r);
}

BirkhoffCurve geodesic_birkhoff_average(const HyperbolicState& start,
                                        const std::function<double(std::complex<double>)>& observable,
                                        double T, double dt, int checkpoints) {
  if (!(dt > 0.0) || !(T > 0.0)) throw Error(ErrorKind::domain, "birkhoff: need T, dt > 0");
  std::int64_t steps = static_cast<std::int64_t>(std::llround(T / dt));
  BirkhoffCurve out;
  HyperbolicState g = reduce(start);
  double acc = 0.0;
  std::int64_t next_cp = steps / checkpoints;
  for (std::int64_t i = 1; i <= steps; ++i) {
    g = geodesic_advance(g, dt);
    g = reduce(g);
    if (i % 64 == 0) g.renormalize();
    acc += observable(to_disk(base_point(g))) * dt;
    if (i == next_cp || i == steps) {
      out.times.push_back(i * dt);
      out.averages.push_back(acc / (i * dt));
      if (out.times.size() < static_cast<std::size_t>(checkpoints))
        next_cp = steps * static_cast<std::int64_t>(out.times.size() + 1) / checkpoints;
    }
  }
  return out;
}

}  // namespace srqe::hyp
