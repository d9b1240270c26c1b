#include "srqe/contact_model.hpp"

#include <cmath>

#include <json.hpp>

#include "srqe/errors.hpp"
#include "srqe/util.hpp"

using nlohmann::json;

namespace srqe {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double FourierSeries2D::eval(double x, double y, double Lx, double Ly) const {
  double v = 0.0;
  for (const auto& t : terms) v += t.amp * std::cos(kTwoPi * (t.kx * x / Lx + t.ky * y / Ly) + t.phase);
  return v;
}

double FourierSeries2D::dx(double x, double y, double Lx, double Ly) const {
  double v = 0.0;
  for (const auto& t : terms) {
    double w = kTwoPi * t.kx / Lx;
    v -= t.amp * w * std::sin(kTwoPi * (t.kx * x / Lx + t.ky * y / Ly) + t.phase);
  }
  return v;
}

double FourierSeries2D::dy(double x, double y, double Lx, double Ly) const {
  double v = 0.0;
  for (const auto& t : terms) {
    double w = kTwoPi * t.ky / Ly;
    v -= t.amp * w * std::sin(kTwoPi * (t.kx * x / Lx + t.ky * y / Ly) + t.phase);
  }
  return v;
}

double FourierSeries2D::dxx(double x, double y, double Lx, double Ly) const {
  double v = 0.0;
  for (const auto& t : terms) {
    double w = kTwoPi * t.kx / Lx;
    v -= t.amp * w * w * std::cos(kTwoPi * (t.kx * x / Lx + t.ky * y / Ly) + t.phase);
  }
  return v;
}

double FourierSeries2D::dxy(double x, double y, double Lx, double Ly) const {
  double v = 0.0;
  for (const auto& t : terms) {
    double wx = kTwoPi * t.kx / Lx, wy = kTwoPi * t.ky / Ly;
    v -= t.amp * wx * wy * std::cos(kTwoPi * (t.kx * x / Lx + t.ky * y / Ly) + t.phase);
  }
  return v;
}

double FourierSeries2D::dyy(double x, double y, double Lx, double Ly) const {
  double v = 0.0;
  for (const auto& t : terms) {
    double w = kTwoPi * t.ky / Ly;
    v -= t.amp * w * w * std::cos(kTwoPi * (t.kx * x / Lx + t.ky * y / Ly) + t.phase);
  }
  return v;
}

void ContactModel::reeb(double x, double y, double out[3]) const {
  const double Lx = lattice.Lx, Ly = lattice.Ly;
  double fa = frame_a(x, y), fb = frame_b(x, y);
  double fa_x = epsilon * coeff_a.dx(x, y, Lx, Ly), fa_y = epsilon * coeff_a.dy(x, y, Lx, Ly);
  double fb_x = epsilon * coeff_b.dx(x, y, Lx, Ly), fb_y = epsilon * coeff_b.dy(x, y, Lx, Ly);
  double F = fa * fb;
  double Fx = fa_x * fb + fa * fb_x;
  double Fy = fa_y * fb + fa * fb_y;
  out[0] = -Fy;
  out[1] = Fx;
  out[2] = F - x * Fx;
}

void ContactModel::reeb_jacobian(double x, double y, double out[9]) const {
  const double Lx = lattice.Lx, Ly = lattice.Ly;
  double fa = frame_a(x, y), fb = frame_b(x, y);
  double fa_x = epsilon * coeff_a.dx(x, y, Lx, Ly), fa_y = epsilon * coeff_a.dy(x, y, Lx, Ly);
  double fb_x = epsilon * coeff_b.dx(x, y, Lx, Ly), fb_y = epsilon * coeff_b.dy(x, y, Lx, Ly);
  double fa_xx = epsilon * coeff_a.dxx(x, y, Lx, Ly), fa_xy = epsilon * coeff_a.dxy(x, y, Lx, Ly),
         fa_yy = epsilon * coeff_a.dyy(x, y, Lx, Ly);
  double fb_xx = epsilon * coeff_b.dxx(x, y, Lx, Ly), fb_xy = epsilon * coeff_b.dxy(x, y, Lx, Ly),
         fb_yy = epsilon * coeff_b.dyy(x, y, Lx, Ly);

  double Fx = fa_x * fb + fa * fb_x;
  double Fy = fa_y * fb + fa * fb_y;
  double Fxx = fa_xx * fb + 2.0 * fa_x * fb_x + fa * fb_xx;
  double Fxy = fa_xy * fb + fa_x * fb_y + fa_y * fb_x + fa * fb_xy;
  double Fyy = fa_yy * fb + 2.0 * fa_y * fb_y + fa * fb_yy;

  // Z = (-Fy, Fx, F - x Fx), all z-independent.
  out[0] = -Fxy;
  out[1] = -Fyy;
  out[2] = 0.0;
  out[3] = Fxx;
  out[4] = Fxy;
  out[5] = 0.0;
  out[6] = -x * Fxx;  // d/dx (F - x Fx) = Fx - Fx - x Fxx
  out[7] = Fy - x * Fxy;
  out[8] = 0.0;
}

void ContactModel::validate(int samples) const {
  const double Lx = lattice.Lx, Ly = lattice.Ly;
  if (!(Lx > 0.0 && Ly > 0.0 && lattice.Lz > 0.0))
    throw Error(ErrorKind::config, "ContactModel: lattice periods must be positive");
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      double x = Lx * i / samples, y = Ly * j / samples;
      if (!(frame_a(x, y) > 0.0) || !(frame_b(x, y) > 0.0))
        throw Error(ErrorKind::config, "ContactModel: frame factor non-positive at (" +
                                           util::fmt17(x) + ", " + util::fmt17(y) + ")");
      if (density_h && !(density_h->eval(x, y, Lx, Ly) > 0.0))
        throw Error(ErrorKind::config, "ContactModel: density_h non-positive at (" +
                                           util::fmt17(x) + ", " + util::fmt17(y) + ")");
    }
  }
}

namespace {

FourierSeries2D series_from_json(const json& arr, const char* name) {
  if (!arr.is_array()) throw Error(ErrorKind::config, std::string(name) + " must be an array");
  FourierSeries2D s;
  for (const auto& t : arr) {
    FourierTerm ft;
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (it.key() == "kx")
        ft.kx = it.value().get<int>();
      else if (it.key() == "ky")
        ft.ky = it.value().get<int>();
      else if (it.key() == "amp")
        ft.amp = it.value().get<double>();
      else if (it.key() == "phase")
        ft.phase = it.value().get<double>();
      else
        throw Error(ErrorKind::config, std::string("unknown key in ") + name + ": " + it.key());
    }
    s.terms.push_back(ft);
  }
  return s;
}

json series_to_json(const FourierSeries2D& s) {
  json arr = json::array();
  for (const auto& t : s.terms)
    arr.push_back({{"kx", t.kx}, {"ky", t.ky}, {"amp", t.amp}, {"phase", t.phase}});
  return arr;
}

}  // namespace

ContactModel ContactModel::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::config, std::string("model JSON parse error: ") + e.what());
  }
  ContactModel m;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "epsilon")
      m.epsilon = it.value().get<double>();
    else if (key == "coeff_a")
      m.coeff_a = series_from_json(it.value(), "coeff_a");
    else if (key == "coeff_b")
      m.coeff_b = series_from_json(it.value(), "coeff_b");
    else if (key == "density_h")
      m.density_h = series_from_json(it.value(), "density_h");
    else if (key == "lattice") {
      for (auto lt = it.value().begin(); lt != it.value().end(); ++lt) {
        if (lt.key() == "Lx")
          m.lattice.Lx = lt.value().get<double>();
        else if (lt.key() == "Ly")
          m.lattice.Ly = lt.value().get<double>();
        else if (lt.key() == "Lz")
          m.lattice.Lz = lt.value().get<double>();
        else
          throw Error(ErrorKind::config, "unknown key in lattice: " + lt.key());
      }
    } else {
      throw Error(ErrorKind::config, "unknown key in model: " + key);
    }
  }
  if (m.epsilon < 0.0) throw Error(ErrorKind::config, "model: epsilon must be >= 0");
  m.validate();
  return m;
}

std::string ContactModel::to_json_text() const {
  json j;
  j["epsilon"] = epsilon;
  j["coeff_a"] = series_to_json(coeff_a);
  j["coeff_b"] = series_to_json(coeff_b);
  if (density_h) j["density_h"] = series_to_json(*density_h);
  j["lattice"] = {{"Lx", lattice.Lx}, {"Ly", lattice.Ly}, {"Lz", lattice.Lz}};
  return j.dump();
}

}  // namespace srqe
