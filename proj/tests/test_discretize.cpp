#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "srqe/discretize.hpp"
#include "srqe/eigensolve.hpp"
#include "srqe/errors.hpp"

using namespace srqe;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

ContactModel flat_model() { return ContactModel{}; }

// a = cos(2 pi x/Lx) cos(2 pi y/Ly) as a two-term cosine series.
FourierSeries2D cos_cos_series() {
  FourierSeries2D s;
  s.terms = {{1, 1, 0.5, 0.0}, {1, -1, 0.5, 0.0}};
  return s;
}

ContactModel perturbed_model(double eps) {
  ContactModel m;
  m.epsilon = eps;
  m.coeff_a = cos_cos_series();
  return m;
}

// Test-side quadrature oracle: composite 16-point Gauss-Legendre product
// rule, independent of the trapezoid rule inside popp_volume.
double popp_volume_gl_oracle(const ContactModel& model, int panels) {
  static const double gx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                               0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                               0.9445750230732326, 0.9894009349916499};
  static const double gw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                               0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                               0.0622535239386479, 0.0271524594117541};
  const double Lx = model.lattice.Lx, Ly = model.lattice.Ly;
  double acc = 0.0;
  for (int px = 0; px < panels; ++px) {
    double ax = Lx * px / panels, bx = Lx * (px + 1) / panels;
    for (int py = 0; py < panels; ++py) {
      double ay = Ly * py / panels, by = Ly * (py + 1) / panels;
      for (int ix = 0; ix < 16; ++ix) {
        double nx = ix < 8 ? -gx[7 - ix] : gx[ix - 8];
        double wx = ix < 8 ? gw[7 - ix] : gw[ix - 8];
        double x = 0.5 * (ax + bx) + 0.5 * (bx - ax) * nx;
        for (int iy = 0; iy < 16; ++iy) {
          double ny = iy < 8 ? -gx[7 - iy] : gx[iy - 8];
          double wy = iy < 8 ? gw[7 - iy] : gw[iy - 8];
          double y = 0.5 * (ay + by) + 0.5 * (by - ay) * ny;
          acc += wx * wy * 0.25 * (bx - ax) * (by - ay) * model.popp_weight(x, y);
        }
      }
    }
  }
  return model.lattice.Lz * acc;
}

}  // namespace

TEST_CASE("popp volume: flat model gives 4 pi^2") {
  CHECK(grid::popp_volume(flat_model(), 64) == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-13));
}

TEST_CASE("popp volume matches an independent high-order quadrature") {
  auto m = perturbed_model(0.1);
  double trap = grid::popp_volume(m, 64);
  double oracle = popp_volume_gl_oracle(m, 32);
  CHECK(trap == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("popp volume symmetric under swapping a and b") {
  ContactModel m1;
  m1.epsilon = 0.15;
  m1.coeff_a = cos_cos_series();
  ContactModel m2;
  m2.epsilon = 0.15;
  m2.coeff_b = cos_cos_series();
  CHECK(grid::popp_volume(m1, 128) == doctest::Approx(grid::popp_volume(m2, 128)).epsilon(1e-14));
}

TEST_CASE("invariant violation: frame factor crossing zero is rejected") {
  ContactModel m;
  m.epsilon = 1.5;  // 1 + 1.5 cos cos dips below zero
  m.coeff_a = cos_cos_series();
  CHECK_THROWS_AS((void)grid::popp_volume(m, 64), Error);
  CHECK_THROWS_AS((void)grid::build_torus_sector(m, 16), Error);
}

TEST_CASE("all builders produce exactly hermitian matrices") {
  auto flat = flat_model();
  auto pert = perturbed_model(0.1);
  CHECK(grid::build_torus_sector(flat, 12).is_hermitian_exact());
  CHECK(grid::build_sector_operator(flat, 2, 12).is_hermitian_exact());
  CHECK(grid::build_sector_operator(pert, 3, 12).is_hermitian_exact());
  CHECK(grid::build_full3d(flat, 8).is_hermitian_exact());
  ContactModel dens = pert;
  dens.density_h = FourierSeries2D{{{0, 0, 1.0, 0.0}, {1, 0, 0.2, 0.0}}};
  CHECK(grid::build_sector_operator(dens, 1, 12).is_hermitian_exact());
  CHECK(grid::build_full3d(dens, 8).is_hermitian_exact());
}

TEST_CASE("flux quantization: incompatible lattice fails loudly") {
  ContactModel m;
  m.lattice.Lx = 2.0;  // m Lx Ly not in 2 pi Z
  CHECK_THROWS_AS((void)grid::build_sector_operator(m, 1, 16), Error);
  CHECK_THROWS_AS((void)grid::build_sector_operator(flat_model(), 0, 16), Error);
}

TEST_CASE("torus sector: flat spectrum matches the separable closed form") {
  const int n = 16;
  auto op = grid::build_torus_sector(flat_model(), n);
  auto vals = eigs::dense_eigenvalues(op);
  // Separable stencil eigenvalues (2 - 2 cos) / h^2 in each direction.
  const double h = flat_model().lattice.Lx / n;
  std::vector<double> expect;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      expect.push_back((2.0 - 2.0 * std::cos(kTwoPi * j / n)) / (h * h) +
                       (2.0 - 2.0 * std::cos(kTwoPi * k / n)) / (h * h));
  std::sort(expect.begin(), expect.end());
  REQUIRE(vals.size() == expect.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    CHECK(vals[i] == doctest::Approx(expect[i]).epsilon(1e-11));
}

TEST_CASE("torus sector: second distinct level near 2 pi at n=32") {
  auto vals = eigs::dense_eigenvalues(grid::build_torus_sector(flat_model(), 32));
  CHECK(std::abs(vals[0]) < 1e-10);
  CHECK(vals[1] == doctest::Approx(kTwoPi).epsilon(0.02));
}

TEST_CASE("torus sector keeps the constant kernel for any eps") {
  auto op = grid::build_torus_sector(perturbed_model(0.2), 16);
  // Kernel vector of the symmetrized operator is M^{1/2} * constant.
  auto vals = eigs::dense_eig(op);
  CHECK(std::abs(vals[0].value) < 1e-12);
}

TEST_CASE("Landau sector m=1: lowest level near 1, unique below 2") {
  auto op = grid::build_sector_operator(flat_model(), 1, 64);
  auto pairs = eigs::lanczos_lowest(op, 4, 1e-9, 100000, 1);
  CHECK(pairs[0].value == doctest::Approx(1.0).epsilon(0.01));
  int below2 = 0;
  for (const auto& e : pairs)
    if (e.value < 2.0) ++below2;
  CHECK(below2 == 1);
}

TEST_CASE("Landau sector m=3: three states in the 1%-window, next cluster near 9") {
  auto op = grid::build_sector_operator(flat_model(), 3, 64);
  auto pairs = eigs::lanczos_lowest(op, 5, 1e-9, 200000, 2);
  int in_window = 0;
  for (const auto& e : pairs)
    if (e.value >= 3.0 * 0.99 && e.value <= 3.0 * 1.01) ++in_window;
  CHECK(in_window == 3);
  CHECK(pairs[3].value == doctest::Approx(9.0).epsilon(0.03));

  // Dense oracle on a coarser grid: same structure.
  auto dense = eigs::dense_eigenvalues(grid::build_sector_operator(flat_model(), 3, 32));
  CHECK(dense[0] == doctest::Approx(3.0).epsilon(0.02));
  CHECK(dense[1] == doctest::Approx(3.0).epsilon(0.02));
  CHECK(dense[2] == doctest::Approx(3.0).epsilon(0.02));
  CHECK(dense[3] == doctest::Approx(9.0).epsilon(0.05));
}

TEST_CASE("sector spectra for m and -m coincide to machine precision") {
  auto mp = eigs::dense_eigenvalues(grid::build_sector_operator(perturbed_model(0.1), 2, 20));
  auto mm = eigs::dense_eigenvalues(grid::build_sector_operator(perturbed_model(0.1), -2, 20));
  REQUIRE(mp.size() == mm.size());
  for (std::size_t i = 0; i < mp.size(); ++i)
    CHECK(mp[i] == doctest::Approx(mm[i]).epsilon(1e-12));
}

TEST_CASE("consistency order 2: m=1 lowest level error shrinks ~4x per refinement") {
  double prev_err = 0.0;
  std::vector<double> errs;
  for (int n : {16, 32, 64}) {
    auto op = grid::build_sector_operator(flat_model(), 1, n);
    auto pairs = eigs::lanczos_lowest(op, 1, 1e-10, 100000, 3);
    errs.push_back(std::abs(pairs[0].value - 1.0));
  }
  double slope1 = std::log2(errs[0] / errs[1]);
  double slope2 = std::log2(errs[1] / errs[2]);
  CHECK(slope1 == doctest::Approx(2.0).epsilon(0.15));
  CHECK(slope2 == doctest::Approx(2.0).epsilon(0.15));
  (void)prev_err;
}

TEST_CASE("full3d: lowest ten flat eigenvalues reproduce {0,1,1,2,2,2,2,3,3,3}") {
  auto op = grid::build_full3d(flat_model(), 24);
  auto pairs = eigs::lanczos_lowest(op, 10, 1e-8, 400000, 4);
  std::vector<double> expect = {0, 1, 1, 2, 2, 2, 2, 3, 3, 3};
  for (int i = 0; i < 10; ++i) {
    if (expect[i] == 0.0)
      CHECK(std::abs(pairs[i].value) < 1e-8);
    else
      CHECK(pairs[i].value == doctest::Approx(expect[i]).epsilon(0.02));
  }
}

TEST_CASE("full3d equals the union of sector spectra (flat, lowest block)") {
  // Each vertical Fourier block of the 3D matrix coincides with the
  // corresponding sector matrix (exact spectral transport), so the
  // spectra agree to eigensolver accuracy.
  auto full = eigs::lanczos_lowest(grid::build_full3d(flat_model(), 16), 7, 1e-9, 400000, 5);
  std::vector<double> sectors;
  sectors.push_back(0.0);  // torus constant
  auto t = eigs::dense_eigenvalues(grid::build_torus_sector(flat_model(), 16));
  sectors.push_back(t[1]);
  for (int m : {1, -1, 2, -2}) {
    auto p = eigs::lanczos_lowest(grid::build_sector_operator(flat_model(), m, 16),
                                  std::abs(m) + 1, 1e-9, 100000, 6);
    for (const auto& e : p) sectors.push_back(e.value);
  }
  std::sort(sectors.begin(), sectors.end());
  for (int i = 0; i < 7; ++i) {
    if (sectors[i] == 0.0)
      CHECK(std::abs(full[i].value) < 1e-8);
    else
      CHECK(full[i].value == doctest::Approx(sectors[i]).epsilon(1e-6));
  }
}

TEST_CASE("full3d applies to the constant as zero") {
  auto op = grid::build_full3d(flat_model(), 8);
  std::vector<cplx> ones(op.dim, 1.0);
  auto r = op.apply(ones);
  double mx = 0.0;
  for (auto& v : r) mx = std::max(mx, std::abs(v));
  CHECK(mx < 1e-10);
}

TEST_CASE("full3d twist check rejects incompatible custom lattices") {
  ContactModel m;
  m.lattice.Lz = 5.0;  // Lx*Ly/Lz = 2 pi/5, not a lattice shift
  CHECK_THROWS_AS((void)grid::build_full3d(m, 8), Error);
}

TEST_CASE("gauge transform: h = 1 gives deviation exactly zero") {
  FourierSeries2D one{{{0, 0, 1.0, 0.0}}};
  auto rep = grid::gauge_check(flat_model(), one, 12);
  CHECK(rep.max_spectral_deviation == 0.0);
}

TEST_CASE("gauge transform: conjugated operators agree to 1e-8 at n=24") {
  FourierSeries2D h{{{0, 0, 1.0, 0.0}, {1, 0, 0.2, 0.0}}};  // 1 + 0.2 cos(2 pi x/Lx)
  auto rep = grid::gauge_check(flat_model(), h, 24);
  CHECK(rep.max_spectral_deviation < 1e-8);
  // Perturbation bound: |lam_k(mu) - lam_k(Popp)| <= max |W|.
  CHECK(rep.max_perturbation_excess < 1e-8);
  CHECK(rep.max_potential > 0.1);  // the potential is genuinely nonzero
}

TEST_CASE("gauge check rejects nonpositive h") {
  FourierSeries2D h{{{1, 0, 1.0, 0.0}}};  // cos alone crosses zero
  CHECK_THROWS_AS((void)grid::gauge_check(flat_model(), h, 12), Error);
}

TEST_CASE("matrix market export shape") {
  auto op = grid::build_sector_operator(flat_model(), 1, 8);
  std::ostringstream os;
  op.export_matrix_market(os);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "%%MatrixMarket matrix coordinate complex hermitian");
  std::size_t rows, cols, nnz;
  in >> rows >> cols >> nnz;
  CHECK(rows == 64);
  CHECK(cols == 64);
  CHECK(nnz > 64);
}
