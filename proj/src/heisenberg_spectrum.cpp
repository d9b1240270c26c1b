#include "srqe/heisenberg_spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "srqe/errors.hpp"
#include "srqe/util.hpp"

namespace srqe::heis {

void SpectrumList::finalize() {
  std::sort(data.begin(), data.end(), [](const SpectralDatum& a, const SpectralDatum& b) {
    if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
    if (a.kind != b.kind) return a.kind == SectorKind::oscillator && b.kind == SectorKind::torus;
    if (a.l != b.l) return a.l < b.l;
    if (a.m != b.m) return a.m < b.m;
    if (a.j != b.j) return a.j < b.j;
    return a.k < b.k;
  });
  cum_mult_.resize(data.size());
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    acc += data[i].multiplicity;
    cum_mult_[i] = acc;
  }
}

std::int64_t SpectrumList::counting(double lambda) const {
  if (lambda > lambda_max)
    throw Error(ErrorKind::range, "counting: lambda " + util::fmt17(lambda) +
                                      " exceeds enumerated cutoff " + util::fmt17(lambda_max));
  if (data.empty() || lambda < data.front().eigenvalue) return 0;
  // last index with eigenvalue <= lambda
  std::size_t lo = 0, hi = data.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (data[mid].eigenvalue <= lambda)
      lo = mid + 1;
    else
      hi = mid;
  }
  return cum_mult_[lo - 1];
}

SpectrumList enumerate_spectrum(double lambda_max, std::size_t max_entries) {
  if (!(lambda_max > 0.0)) throw Error(ErrorKind::domain, "enumerate_spectrum: lambda_max must be > 0");

  // Entry count estimate before allocating anything.
  std::size_t estimate = 0;
  for (std::int64_t l = 0;; ++l) {
    double level = 2.0 * l + 1.0;
    if (level > lambda_max) break;
    estimate += 2 * static_cast<std::size_t>(lambda_max / level);
  }
  double r2max = lambda_max / (2.0 * M_PI);
  estimate += static_cast<std::size_t>(M_PI * r2max) + 4 * static_cast<std::size_t>(std::sqrt(r2max)) + 8;
  if (estimate > max_entries)
    throw Error(ErrorKind::resource, "enumerate_spectrum: cutoff needs ~" + std::to_string(estimate) +
                                         " entries, budget is " + std::to_string(max_entries));

  SpectrumList out;
  out.lambda_max = lambda_max;
  out.data.reserve(estimate);

  // Oscillator sectors: (2l+1)|m| <= lambda_max, multiplicity |m|.
  for (int l = 0;; ++l) {
    double level = 2.0 * l + 1.0;
    if (level > lambda_max) break;
    int m_max = static_cast<int>(lambda_max / level);
    for (int m = 1; m <= m_max; ++m) {
      double ev = level * m;
      if (ev > lambda_max) break;
      out.data.push_back({ev, SectorKind::oscillator, l, m, 0, 0, m});
      out.data.push_back({ev, SectorKind::oscillator, l, -m, 0, 0, m});
    }
  }

  // Torus sector: 2*pi*(j^2+k^2) <= lambda_max, one entry per lattice point.
  int jmax = static_cast<int>(std::sqrt(r2max)) + 1;
  for (int j = -jmax; j <= jmax; ++j) {
    for (int k = -jmax; k <= jmax; ++k) {
      double ev = 2.0 * M_PI * (static_cast<double>(j) * j + static_cast<double>(k) * k);
      if (ev <= lambda_max) out.data.push_back({ev, SectorKind::torus, 0, 0, j, k, 1});
    }
  }

  out.finalize();
  return out;
}

double concentration_element(const SpectralDatum& d) {
  if (d.kind == SectorKind::torus) return 0.0;
  double m2 = static_cast<double>(d.m) * d.m;
  return m2 / (m2 + d.eigenvalue);
}

double heat_trace_closed_form(double t, double tol) {
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "heat_trace_closed_form: t must be > 0");
  if (!(tol > 0.0)) throw Error(ErrorKind::domain, "heat_trace_closed_form: tol must be > 0");

  // Oscillator part: sum_l 2 x/(1-x)^2 with x = exp(-(2l+1)t). Terms
  // decrease geometrically with ratio exp(-2t); stop once the bound
  // 2 x_{L+1} / ((1-e^{-2t})(1-x_L)^2) drops below tol.
  double trace = 0.0;
  const double q = std::exp(-2.0 * t);
  double x = std::exp(-t);
  for (std::int64_t l = 0;; ++l) {
    double om = 1.0 - x;
    trace += 2.0 * x / (om * om);
    double tail = 2.0 * (x * q) / ((1.0 - q) * om * om);
    x *= q;
    if (tail < tol) break;
    if (l > 100'000'000) throw Error(ErrorKind::resource, "heat_trace_closed_form: t too small");
  }

  // Torus part: theta(t)^2, theta(t) = 1 + 2 sum_{j>=1} exp(-2 pi j^2 t).
  double theta = 1.0;
  for (std::int64_t j = 1;; ++j) {
    double term = 2.0 * std::exp(-2.0 * M_PI * static_cast<double>(j) * j * t);
    theta += term;
    if (term < 0.25 * tol / (theta + 1.0)) break;
  }
  trace += theta * theta;
  return trace;
}

std::vector<std::pair<double, std::int64_t>> multiplicity_by_value(const SpectrumList& s, double tol) {
  std::vector<std::pair<double, std::int64_t>> out;
  for (const auto& d : s.data) {
    if (!out.empty() && d.eigenvalue - out.back().first <= tol)
      out.back().second += d.multiplicity;
    else
      out.emplace_back(d.eigenvalue, d.multiplicity);
  }
  return out;
}

void export_csv(const SpectrumList& s, std::ostream& out) {
  out << "eigenvalue,sector_kind,l,m,j,k,multiplicity\n";
  for (const auto& d : s.data) {
    out << util::fmt17(d.eigenvalue) << ',';
    if (d.kind == SectorKind::oscillator)
      out << "oscillator," << d.l << ',' << d.m << ",,,";
    else
      out << "torus,,," << d.j << ',' << d.k << ',';
    out << d.multiplicity << '\n';
  }
}

}  // namespace srqe::heis
