#pragma once

// Exact spectral model of the flat Heisenberg quotient.
//
// The lattice x, y in sqrt(2*pi)*Z, z in 2*pi*Z quotients the Heisenberg
// group; the invariant sub-Laplacian splits over the Fourier modes e^{imz}:
//
//   * oscillator sectors (m != 0):  eigenvalues (2l+1)|m|, multiplicity |m|
//   * torus sector      (m == 0):  eigenvalues 2*pi*(j^2 + k^2), one per
//                                  lattice point (j, k)
//
// The counting function obeys N(lambda) ~ (pi^2/8) lambda^2, identical to
// P(M)/32 * lambda^2 with the fundamental volume P = 4*pi^2 below.

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

namespace srqe::heis {

// Volume of the fundamental domain [0,sqrt(2pi))^2 x [0,2pi) under the
// invariant (Popp = Lebesgue) volume: sqrt(2pi)*sqrt(2pi)*2pi = 4*pi^2.
inline constexpr double kFundamentalVolume = 39.478417604357434;  // 4*pi^2

enum class SectorKind { oscillator, torus };

struct SpectralDatum {
  double eigenvalue = 0.0;
  SectorKind kind = SectorKind::torus;
  int l = 0;  // oscillator level, l >= 0
  int m = 0;  // oscillator vertical mode, m != 0
  int j = 0;  // torus lattice labels
  int k = 0;
  std::int64_t multiplicity = 1;
};

struct SpectrumList {
  std::vector<SpectralDatum> data;  // sorted ascending by eigenvalue
  double lambda_max = 0.0;

  // Sum of multiplicities of entries with eigenvalue <= lambda.
  // Throws ErrorKind::range if lambda > lambda_max.
  std::int64_t counting(double lambda) const;

  std::int64_t total_count() const { return cum_mult_.empty() ? 0 : cum_mult_.back(); }

  void finalize();  // sorts data, builds the prefix-sum index

 private:
  std::vector<std::int64_t> cum_mult_;
};

// All oscillator pairs with (2l+1)|m| <= lambda_max and all torus lattice
// points with 2*pi*(j^2+k^2) <= lambda_max. Throws ErrorKind::resource if
// the entry count would exceed max_entries.
SpectrumList enumerate_spectrum(double lambda_max, std::size_t max_entries = 20'000'000);

// Matrix element of the order-zero symbol h_Z^2/(g* + h_Z^2) on one
// eigenspace; equals 1 on the characteristic cone, so its Cesaro mean
// measures concentration there.
//   oscillator (l,m): m^2 / (m^2 + (2l+1)|m|)
//   torus:            0
double concentration_element(const SpectralDatum& d);

// Closed form of sum_n exp(-lambda_n * t):
//   sum_l 2 x_l/(1-x_l)^2 + theta(t)^2,  x_l = exp(-(2l+1) t),
//   theta(t) = sum_{j in Z} exp(-2 pi j^2 t).
// The l-sum is truncated once the geometric tail bound
//   2 e^{-(2L+3)t} / ((1 - e^{-2t}) (1 - x_L)^2)
// falls below tol; the theta series is truncated the same way.
double heat_trace_closed_form(double t, double tol = 1e-12);

// Aggregation view: distinct eigenvalues (within tol) with total
// multiplicity. Sector identity is kept in the SpectrumList itself.
std::vector<std::pair<double, std::int64_t>> multiplicity_by_value(const SpectrumList& s,
                                                                   double tol = 1e-12);

// CSV with header eigenvalue,sector_kind,l,m,j,k,multiplicity; ascending,
// 17 significant digits; non-applicable labels left empty.
void export_csv(const SpectrumList& s, std::ostream& out);

}  // namespace srqe::heis
