#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srqe/discretize.hpp"
#include "srqe/eigensolve.hpp"
#include "srqe/errors.hpp"
#include "srqe/heisenberg_spectrum.hpp"
#include "srqe/weyl_qe.hpp"

using namespace srqe;

TEST_CASE("synthetic exact power law N = lambda^2 is recovered to 1e-12") {
  auto fit = weyl::weyl_fit([](double l) { return l * l; }, 1.0, 100.0);
  CHECK(fit.C == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weyl_fit on the exact spectrum over [200, 2000]") {
  auto s = heis::enumerate_spectrum(2000.0);
  auto fit = weyl::weyl_fit(s, 200.0, 2000.0);
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(0.01));
  CHECK(fit.C == doctest::Approx(M_PI * M_PI / 8.0).epsilon(0.02));
  CHECK(fit.r2 > 0.9999);
}

TEST_CASE("weyl_fit input validation") {
  auto s = heis::enumerate_spectrum(100.0);
  CHECK_THROWS_AS((void)weyl::weyl_fit(s, 50.0, 200.0), Error);   // beyond cutoff
  CHECK_THROWS_AS((void)weyl::weyl_fit(s, 50.0, 80.0, 5), Error); // too few points
}

TEST_CASE("cesaro mean: constants and errors") {
  weyl::MatrixElementSeries s;
  s.entries = {{1.0, 1.0, 1.0}, {2.0, 1.0, 3.0}, {5.0, 1.0, 2.0}};
  CHECK(weyl::cesaro_mean(s, 1.5) == doctest::Approx(1.0));
  CHECK(weyl::cesaro_mean(s, 10.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)weyl::cesaro_mean(s, 0.5), Error);
}

TEST_CASE("variance: constants, torus-only series, decreasing concentration deficit") {
  weyl::MatrixElementSeries c;
  c.entries = {{1.0, 0.7, 1.0}, {2.0, 0.7, 2.0}};
  CHECK(weyl::variance(c, 5.0, 0.7) == doctest::Approx(0.0));

  auto spectrum = heis::enumerate_spectrum(1600.0);
  weyl::MatrixElementSeries torus_only;
  for (const auto& d : spectrum.data)
    if (d.kind == heis::SectorKind::torus)
      torus_only.entries.push_back({d.eigenvalue, heis::concentration_element(d), 1.0});
  torus_only.sort_and_check();
  CHECK(weyl::variance(torus_only, 1000.0, 1.0) == doctest::Approx(1.0));

  auto series = weyl::concentration_series(spectrum);
  double prev = 2.0;
  for (double lam : {200.0, 400.0, 800.0, 1600.0}) {
    double v = weyl::variance(series, lam, 1.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("V(A) <= E(A*A) numerically on the concentration series") {
  auto spectrum = heis::enumerate_spectrum(500.0);
  auto series = weyl::concentration_series(spectrum);
  weyl::MatrixElementSeries squares = series;
  for (auto& e : squares.entries) e.value *= e.value;
  for (double lam : {50.0, 100.0, 200.0, 400.0}) {
    CHECK(weyl::variance(series, lam, 0.0) <= weyl::cesaro_mean(squares, lam) + 1e-14);
  }
}

TEST_CASE("evenness: the m and -m concentration sub-series have equal Cesaro means") {
  auto spectrum = heis::enumerate_spectrum(300.0);
  weyl::MatrixElementSeries plus, minus;
  for (const auto& d : spectrum.data) {
    if (d.kind != heis::SectorKind::oscillator) continue;
    auto& dst = d.m > 0 ? plus : minus;
    dst.entries.push_back({d.eigenvalue, heis::concentration_element(d),
                           static_cast<double>(d.multiplicity)});
  }
  plus.sort_and_check();
  minus.sort_and_check();
  for (double lam : {30.0, 100.0, 300.0})
    CHECK(weyl::cesaro_mean(plus, lam) == doctest::Approx(weyl::cesaro_mean(minus, lam)).epsilon(1e-14));
}

TEST_CASE("local Weyl series of a zero-average multiplier tends to zero") {
  // f = cos(2 pi x / Lx) on sector eigenvectors: the Cesaro mean of the
  // diagonal elements must approach the Popp average of f, which is 0,
  // and the variance must decrease across the computed window.
  ContactModel flat;
  const int n = 24;
  auto nodes = grid::sector_nodes(flat, n);
  weyl::MatrixElementSeries series;
  series.label = "cos_x";
  auto add_sector = [&](int m) {
    SparseOperator op = (m == 0) ? grid::build_torus_sector(flat, n)
                                 : grid::build_sector_operator(flat, m, n);
    auto pairs = eigs::dense_eig(op);
    for (const auto& e : pairs) {
      if (e.value > 12.0) break;
      double elem = 0.0;
      for (std::size_t i = 0; i < e.vector.size(); ++i)
        elem += std::cos(2.0 * M_PI * nodes[i].first / flat.lattice.Lx) * std::norm(e.vector[i]);
      series.entries.push_back({e.value, elem, 1.0});
    }
  };
  add_sector(0);
  for (int m = 1; m <= 12; ++m) {
    add_sector(m);
    add_sector(-m);
  }
  series.sort_and_check();
  double mean = weyl::cesaro_mean(series, 12.0);
  CHECK(std::abs(mean) < 0.02);
  CHECK(weyl::variance(series, 12.0, 0.0) < weyl::variance(series, 3.0, 0.0));
}

TEST_CASE("kvn: perfect-square indicator") {
  const int n = 10000;
  std::vector<double> u(n, 0.0);
  for (int i = 0; i * i < n; ++i) u[i * i] = 1.0;
  auto res = weyl::kvn_extract(u);
  CHECK(res.density_estimate >= 0.99);
  // Tail maxima drop below every reached threshold.
  for (std::size_t k = 0; k < res.level_start.size(); ++k) {
    double mx = 0.0;
    for (std::size_t i = res.level_start[k]; i < u.size(); ++i)
      if (res.kept[i]) mx = std::max(mx, u[i]);
    CHECK(mx < std::pow(2.0, -static_cast<double>(k)));
  }
  // Cofinitely many squares are excluded.
  std::int64_t kept_squares = 0;
  for (int i = 32; i * i < n; ++i) kept_squares += res.kept[i * i];
  CHECK(kept_squares == 0);
}

TEST_CASE("kvn: u_n = 1/n is eventually fully kept") {
  const int n = 4000;
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = 1.0 / (i + 1);
  auto res = weyl::kvn_extract(u);
  std::int64_t discarded_tail = 0;
  for (int i = n / 2; i < n; ++i)
    if (!res.kept[i]) ++discarded_tail;
  CHECK(discarded_tail == 0);
  CHECK(res.density_estimate > 0.9);
}

TEST_CASE("kvn rejects negative input") {
  CHECK_THROWS_AS((void)weyl::kvn_extract({0.1, -0.2}), Error);
}

TEST_CASE("kvn on the concentration deficit excludes the torus sector") {
  auto spectrum = heis::enumerate_spectrum(1500.0);
  std::vector<double> u;
  std::vector<std::uint8_t> is_torus;
  for (const auto& d : spectrum.data) {
    double def = 1.0 - heis::concentration_element(d);
    for (std::int64_t c = 0; c < d.multiplicity; ++c) {
      u.push_back(def);
      is_torus.push_back(d.kind == heis::SectorKind::torus ? 1 : 0);
    }
  }
  auto res = weyl::kvn_extract(u);
  REQUIRE(res.level_start.size() >= 2);  // level 1 reached: threshold 1/2
  std::int64_t torus_kept = 0, torus_total = 0;
  for (std::size_t i = res.level_start[1]; i < u.size(); ++i) {
    if (is_torus[i]) {
      ++torus_total;
      torus_kept += res.kept[i];
    }
  }
  CHECK(torus_total > 0);
  CHECK(torus_kept == 0);
}

TEST_CASE("classification: sector eigenvectors split by vertical energy") {
  ContactModel flat;
  const int n = 32;
  // m = 5 lowest Landau vector: exact value 25/30.
  auto op5 = grid::build_sector_operator(flat, 5, n);
  auto v5 = grid::vertical_form_sector(flat, 5, n);
  auto pairs = eigs::lanczos_lowest(op5, 1, 1e-9, 200000, 3);
  auto r = weyl::quantum_limit_classify(pairs[0].vector, v5, op5);
  CHECK(r.sigma_fraction >= 0.8);
  CHECK(r.sigma_fraction == doctest::Approx(5.0 / 6.0).epsilon(0.01));

  // Torus vector: vertical energy is exactly zero.
  auto op0 = grid::build_torus_sector(flat, n);
  auto v0 = grid::vertical_form_sector(flat, 0, n);
  auto t_pairs = eigs::dense_eig(op0);
  auto rt = weyl::quantum_limit_classify(t_pairs[5].vector, v0, op0);
  CHECK(rt.sigma_fraction <= 0.05);

  // Constant vector: degenerate 0/0 guarded.
  auto rc = weyl::quantum_limit_classify(t_pairs[0].vector, v0, op0);
  CHECK(rc.degenerate);
  CHECK(rc.sigma_fraction == 0.0);

  std::vector<cplx> zero(op0.dim, 0.0);
  CHECK_THROWS_AS((void)weyl::quantum_limit_classify(zero, v0, op0), Error);
}
