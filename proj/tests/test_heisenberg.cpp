#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srqe/errors.hpp"
#include "srqe/heisenberg_spectrum.hpp"
#include "srqe/util.hpp"
#include "srqe/weyl_qe.hpp"

using namespace srqe;

namespace {

// Independent double-loop oracle for N(lambda): oscillator pairs (l, m)
// and torus lattice points (j, k) enumerated directly.
std::int64_t brute_force_counting(double lambda) {
  std::int64_t n = 0;
  for (std::int64_t l = 0; 2 * l + 1 <= lambda; ++l)
    for (std::int64_t m = 1; (2 * l + 1) * m <= lambda; ++m) n += 2 * m;  // +-m, mult |m|
  std::int64_t jmax = static_cast<std::int64_t>(std::sqrt(lambda / (2.0 * M_PI))) + 2;
  for (std::int64_t j = -jmax; j <= jmax; ++j)
    for (std::int64_t k = -jmax; k <= jmax; ++k)
      if (2.0 * M_PI * (j * j + k * k) <= lambda) ++n;
  return n;
}

}  // namespace

TEST_CASE("lambda_max=0.5 only the constant state survives") {
  auto s = heis::enumerate_spectrum(0.5);
  REQUIRE(s.data.size() == 1);
  CHECK(s.data[0].kind == heis::SectorKind::torus);
  CHECK(s.data[0].j == 0);
  CHECK(s.data[0].k == 0);
  CHECK(s.data[0].eigenvalue == 0.0);
  CHECK(s.counting(0.5) == 1);
}

TEST_CASE("N(3.5) = 15 with the expected level breakdown") {
  auto s = heis::enumerate_spectrum(3.5);
  CHECK(s.counting(3.5) == 15);
  CHECK(s.counting(0.0) == 1);
  CHECK(s.counting(1.0) == 3);    // 0 (x1) + 1 (x2)
  CHECK(s.counting(2.0) == 7);    // + 2 (x4)
  CHECK(s.counting(3.0) == 15);   // + 3 (x8)
  auto by_value = heis::multiplicity_by_value(s);
  REQUIRE(by_value.size() == 4);
  CHECK(by_value[0] == std::pair{0.0, std::int64_t{1}});
  CHECK(by_value[1] == std::pair{1.0, std::int64_t{2}});
  CHECK(by_value[2] == std::pair{2.0, std::int64_t{4}});
  CHECK(by_value[3] == std::pair{3.0, std::int64_t{8}});
}

TEST_CASE("torus entries near 2 pi with aggregated multiplicity 4") {
  auto s = heis::enumerate_spectrum(7.0);
  std::int64_t mult = 0;
  for (const auto& d : s.data)
    if (d.kind == heis::SectorKind::torus && std::abs(d.eigenvalue - 2.0 * M_PI) < 1e-12) {
      CHECK(d.multiplicity == 1);  // stored per lattice point
      mult += d.multiplicity;
    }
  CHECK(mult == 4);  // (+-1,0), (0,+-1)
}

TEST_CASE("counting is out-of-range above the cutoff and monotone below") {
  auto s = heis::enumerate_spectrum(50.0);
  CHECK_THROWS_AS((void)s.counting(50.1), Error);
  double prev = -1.0;
  std::int64_t prev_count = 0;
  for (double lam = 0.0; lam <= 50.0; lam += 0.7) {
    auto c = s.counting(lam);
    CHECK(c >= prev_count);
    prev_count = c;
    prev = lam;
  }
  (void)prev;
}

TEST_CASE("enumeration completeness against the double-loop brute force") {
  auto s = heis::enumerate_spectrum(200.0);
  util::Rng rng(7);
  for (int i = 0; i < 25; ++i) {
    double lam = rng.uniform(0.0, 200.0);
    CHECK(s.counting(lam) == brute_force_counting(lam));
  }
}

TEST_CASE("counting beats the Riemannian lambda^(3/2) power") {
  auto s = heis::enumerate_spectrum(2000.0);
  double r200 = static_cast<double>(s.counting(200.0)) / std::pow(200.0, 1.5);
  double r2000 = static_cast<double>(s.counting(2000.0)) / std::pow(2000.0, 1.5);
  CHECK(r2000 > r200);
}

TEST_CASE("N(1000)/1000^2 approaches pi^2/8") {
  auto s = heis::enumerate_spectrum(1000.0);
  double ratio = static_cast<double>(s.counting(1000.0)) / 1e6;
  CHECK(ratio == doctest::Approx(M_PI * M_PI / 8.0).epsilon(0.02));
}

TEST_CASE("resource budget rejects absurd cutoffs") {
  CHECK_THROWS_AS((void)heis::enumerate_spectrum(1e6, 1000), Error);
}

TEST_CASE("concentration elements") {
  heis::SpectralDatum d;
  d.kind = heis::SectorKind::oscillator;
  d.l = 0;
  d.m = 1;
  d.eigenvalue = 1.0;
  CHECK(heis::concentration_element(d) == doctest::Approx(0.5).epsilon(1e-15));
  d.m = 10;
  d.eigenvalue = 10.0;
  CHECK(heis::concentration_element(d) == doctest::Approx(100.0 / 110.0).epsilon(1e-15));
  heis::SpectralDatum t;
  t.kind = heis::SectorKind::torus;
  t.j = 1;
  t.k = 0;
  t.eigenvalue = 2.0 * M_PI;
  CHECK(heis::concentration_element(t) == 0.0);
}

TEST_CASE("heat trace closed form matches a direct partial sum at t=1") {
  auto s = heis::enumerate_spectrum(50.0);
  double direct = 0.0;
  for (const auto& d : s.data) direct += d.multiplicity * std::exp(-d.eigenvalue * 1.0);
  // Tail above lambda = 50 at t = 1 is far below 1e-10.
  CHECK(heis::heat_trace_closed_form(1.0, 1e-14) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("heat trace: t -> infinity limit, monotonicity, t^2 bound") {
  CHECK(heis::heat_trace_closed_form(60.0, 1e-15) == doctest::Approx(1.0).epsilon(1e-12));
  double prev = heis::heat_trace_closed_form(1e-3, 1e-10);
  for (double t : {3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0}) {
    double cur = heis::heat_trace_closed_form(t, 1e-12);
    CHECK(cur < prev);
    prev = cur;
  }
  for (double t = 1e-3; t <= 1.0; t *= 2.5) {
    double bound = t * t * heis::heat_trace_closed_form(t, 1e-10);
    CHECK(bound < 3.0);
    CHECK(bound > 1.0);
  }
}

TEST_CASE("t^2 trace tends to pi^2/4 (Karamata regime)") {
  double v = 1e-6 * heis::heat_trace_closed_form(1e-3, 1e-10);
  CHECK(v == doctest::Approx(M_PI * M_PI / 4.0).epsilon(0.01));
}

TEST_CASE("heat trace rejects nonpositive t") {
  CHECK_THROWS_AS((void)heis::heat_trace_closed_form(0.0, 1e-10), Error);
  CHECK_THROWS_AS((void)heis::heat_trace_closed_form(-1.0, 1e-10), Error);
}

TEST_CASE("Cesaro mean of concentration increases toward 1 on a doubling grid") {
  auto s = heis::enumerate_spectrum(3200.0);
  auto series = weyl::concentration_series(s);
  double prev = 0.0;
  for (double lam = 100.0; lam <= 3200.0; lam *= 2.0) {
    double mean = weyl::cesaro_mean(series, lam);
    CHECK(mean > prev);
    CHECK(mean < 1.0);
    prev = mean;
  }
}

TEST_CASE("CSV export: header, ordering, label layout") {
  auto s = heis::enumerate_spectrum(3.0);
  std::ostringstream os;
  heis::export_csv(s, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "eigenvalue,sector_kind,l,m,j,k,multiplicity");
  std::getline(in, line);
  CHECK(line == "0,torus,,,0,0,1");
  std::getline(in, line);
  CHECK(line == "1,oscillator,0,-1,,,1");
}
