#pragma once

// Contact models on the Heisenberg quotient with z-independent frame
// perturbations:
//
//   X = (1 + eps*a(x,y)) X_H,   Y = (1 + eps*b(x,y)) Y_H,
//   X_H = d/dx,                 Y_H = d/dy - x d/dz,
//
// on the lattice x,y in sqrt(2pi)Z, z in 2pi Z. The normalized contact
// form is alpha_g = alpha_H / ((1+eps a)(1+eps b)) (so that d(alpha_g)
// restricted to the distribution is the metric area form), hence
//
//   alpha_g ^ d(alpha_g) = conformal^2 * alpha_H ^ d(alpha_H),
//   conformal = 1/((1+eps a)(1+eps b)),
//
// and the Popp density is conformal^2 * dx dy dz. Writing F = 1/conformal,
// the Reeb field solves alpha_g(Z)=1, d(alpha_g)(Z,.)=0:
//
//   Z = -F_y d/dx + F_x (d/dy - x d/dz) + F d/dz.
//
// An optional positive density factor h(x,y) selects mu = h^2 * Popp.

#include <optional>
#include <string>
#include <vector>

namespace srqe {

struct FourierTerm {
  int kx = 0;
  int ky = 0;
  double amp = 0.0;
  double phase = 0.0;  // value: amp * cos(2 pi (kx x/Lx + ky y/Ly) + phase)
};

struct FourierSeries2D {
  std::vector<FourierTerm> terms;

  double eval(double x, double y, double Lx, double Ly) const;
  double dx(double x, double y, double Lx, double Ly) const;
  double dy(double x, double y, double Lx, double Ly) const;
  double dxx(double x, double y, double Lx, double Ly) const;
  double dxy(double x, double y, double Lx, double Ly) const;
  double dyy(double x, double y, double Lx, double Ly) const;
  bool empty() const { return terms.empty(); }
};

struct Lattice {
  double Lx = 2.5066282746310002;  // sqrt(2 pi)
  double Ly = 2.5066282746310002;
  double Lz = 6.2831853071795865;  // 2 pi
};

struct ContactModel {
  double epsilon = 0.0;
  FourierSeries2D coeff_a;
  FourierSeries2D coeff_b;
  std::optional<FourierSeries2D> density_h;  // mu = h^2 * Popp when present
  Lattice lattice;

  bool is_flat() const { return epsilon == 0.0 && !density_h; }

  // Frame factors 1 + eps*a, 1 + eps*b and their derivatives.
  double frame_a(double x, double y) const { return 1.0 + epsilon * coeff_a.eval(x, y, lattice.Lx, lattice.Ly); }
  double frame_b(double x, double y) const { return 1.0 + epsilon * coeff_b.eval(x, y, lattice.Lx, lattice.Ly); }

  // F = (1+eps a)(1+eps b); Popp weight is 1/F^2.
  double frame_product(double x, double y) const { return frame_a(x, y) * frame_b(x, y); }
  double popp_weight(double x, double y) const {
    double f = frame_product(x, y);
    return 1.0 / (f * f);
  }
  double density_factor(double x, double y) const {
    return density_h ? density_h->eval(x, y, lattice.Lx, lattice.Ly) : 1.0;
  }
  // Weight of the spectral measure mu (= density^2 * Popp weight).
  double measure_weight(double x, double y) const {
    double h = density_factor(x, y);
    return h * h * popp_weight(x, y);
  }

  // Reeb field components (Zx, Zy, Zz) at q = (x, y, z).
  void reeb(double x, double y, double out[3]) const;
  // Jacobian d(Z)/d(x,y,z), row-major 3x3 (z-independent model).
  void reeb_jacobian(double x, double y, double out[9]) const;

  // Checks positivity of the frame factors and of density_h on a dense
  // sample grid; throws ErrorKind::config on violation.
  void validate(int samples = 128) const;

  static ContactModel from_json_text(const std::string& text);
  std::string to_json_text() const;
};

}  // namespace srqe
