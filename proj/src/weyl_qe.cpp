#include "srqe/weyl_qe.hpp"

#include <algorithm>
#include <cmath>

#include "srqe/errors.hpp"
#include "srqe/util.hpp"

namespace srqe::weyl {

void MatrixElementSeries::sort_and_check() {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SeriesEntry& a, const SeriesEntry& b) { return a.eigenvalue < b.eigenvalue; });
  for (const auto& e : entries)
    if (!std::isfinite(e.value) || !std::isfinite(e.eigenvalue) || !(e.weight > 0.0))
      throw Error(ErrorKind::domain, "series: entries must be finite with positive weights");
}

namespace {

WeylFit fit_counting(const std::function<double(double)>& counting, double lo, double hi, int n_pts) {
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::domain, "weyl_fit: need 0 < lambda_lo < lambda_hi");
  if (n_pts < 10) throw Error(ErrorKind::domain, "weyl_fit: need >= 10 fit points");

  std::vector<double> lx, ly;
  double ratio = std::pow(hi / lo, 1.0 / (n_pts - 1));
  double lam = lo;
  for (int i = 0; i < n_pts; ++i, lam *= ratio) {
    double nv = counting(std::min(lam, hi));
    if (nv <= 0.0) throw Error(ErrorKind::domain, "weyl_fit: empty window (N = 0 at lambda = " +
                                                      util::fmt17(lam) + ")");
    lx.push_back(std::log(std::min(lam, hi)));
    ly.push_back(std::log(nv));
  }
  auto f = util::fit_line(lx, ly);
  WeylFit out;
  out.C = std::exp(f.intercept);
  out.exponent = f.slope;
  out.r2 = f.r2;
  out.lambda_lo = lo;
  out.lambda_hi = hi;
  return out;
}

}  // namespace

WeylFit weyl_fit(const std::function<double(double)>& counting, double lo, double hi, int n_pts) {
  return fit_counting(counting, lo, hi, n_pts);
}

WeylFit weyl_fit(const heis::SpectrumList& spectrum, double lo, double hi, int n_pts) {
  if (hi > spectrum.lambda_max)
    throw Error(ErrorKind::range, "weyl_fit: window exceeds the enumerated cutoff");
  return fit_counting([&](double l) { return static_cast<double>(spectrum.counting(l)); }, lo, hi, n_pts);
}

WeylFit weyl_fit(const std::vector<double>& sorted_eigenvalues, double lo, double hi, int n_pts) {
  return fit_counting(
      [&](double l) {
        auto it = std::upper_bound(sorted_eigenvalues.begin(), sorted_eigenvalues.end(), l);
        return static_cast<double>(it - sorted_eigenvalues.begin());
      },
      lo, hi, n_pts);
}

namespace {

// Weighted partial sums over entries with eigenvalue <= lambda.
std::pair<double, double> partial_sums(const MatrixElementSeries& s, double lambda,
                                       const std::function<double(const SeriesEntry&)>& f) {
  double num = 0.0, den = 0.0;
  for (const auto& e : s.entries) {
    if (e.eigenvalue > lambda) break;
    num += e.weight * f(e);
    den += e.weight;
  }
  if (den == 0.0) throw Error(ErrorKind::domain, "series: no entries below lambda");
  return {num, den};
}

}  // namespace

double cesaro_mean(const MatrixElementSeries& s, double lambda) {
  auto [num, den] = partial_sums(s, lambda, [](const SeriesEntry& e) { return e.value; });
  return num / den;
}

double variance(const MatrixElementSeries& s, double lambda, double center) {
  auto [num, den] = partial_sums(s, lambda, [&](const SeriesEntry& e) {
    double d = e.value - center;
    return d * d;
  });
  return num / den;
}

DensityOneSet kvn_extract(const std::vector<double>& values) {
  const std::size_t n = values.size();
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::domain, "kvn_extract: values must be nonnegative and finite");

  DensityOneSet out;
  out.kept.assign(n, 1);
  if (n == 0) return out;

  // Running Cesaro means.
  std::vector<double> mean(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += values[i];
    mean[i] = acc / static_cast<double>(i + 1);
  }

  // T_k: first index after which the mean STAYS below 4^{-k}; computed by
  // a backward sweep (last index where mean >= threshold, plus one).
  for (int k = 0;; ++k) {
    double thr = std::pow(4.0, -k);
    std::int64_t Tk = 0;
    for (std::int64_t i = static_cast<std::int64_t>(n) - 1; i >= 0; --i) {
      if (mean[i] >= thr) {
        Tk = i + 1;
        break;
      }
    }
    if (Tk >= static_cast<std::int64_t>(n)) break;  // level never reached
    out.level_start.push_back(Tk);
    if (thr == 0.0) break;  // paranoia; unreachable
    if (out.level_start.size() > 600) break;        // 4^{-600} underflows anyway
  }

  // Active level at index i: largest k with T_k <= i (levels are nested,
  // T_0 <= T_1 <= ...). Before T_0 everything is kept.
  std::size_t lvl = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (lvl + 1 < out.level_start.size() &&
           static_cast<std::int64_t>(i) >= out.level_start[lvl + 1])
      ++lvl;
    if (out.level_start.empty() || static_cast<std::int64_t>(i) < out.level_start[0]) continue;
    double keep_thr = std::pow(2.0, -static_cast<double>(lvl));
    out.kept[i] = values[i] < keep_thr ? 1 : 0;
  }

  std::size_t kept_count = 0;
  for (auto b : out.kept) kept_count += b;
  out.density_estimate = static_cast<double>(kept_count) / static_cast<double>(n);
  return out;
}

ClassifyResult quantum_limit_classify(const std::vector<cplx>& eigvec,
                                      const SparseOperator& vertical_energy,
                                      const SparseOperator& horizontal_energy) {
  if (eigvec.size() != vertical_energy.dim || eigvec.size() != horizontal_energy.dim)
    throw Error(ErrorKind::domain, "quantum_limit_classify: dimension mismatch");
  double norm2 = 0.0;
  for (const auto& z : eigvec) norm2 += std::norm(z);
  if (norm2 == 0.0) throw Error(ErrorKind::domain, "quantum_limit_classify: zero vector");

  auto quad = [&](const SparseOperator& A) {
    auto Av = A.apply(eigvec);
    double s = 0.0;
    for (std::size_t i = 0; i < eigvec.size(); ++i)
      s += (std::conj(eigvec[i]) * Av[i]).real();
    return s / norm2;
  };
  double vert = quad(vertical_energy);
  double horiz = quad(horizontal_energy);

  ClassifyResult r;
  double denom = vert + horiz;
  if (std::abs(denom) < 1e-12) {
    r.degenerate = true;  // constant eigenvector: 0/0 guarded, defined as 0
    r.sigma_fraction = 0.0;
    return r;
  }
  r.sigma_fraction = vert / denom;
  return r;
}

MatrixElementSeries concentration_series(const heis::SpectrumList& spectrum) {
  MatrixElementSeries s;
  s.label = "concentration";
  s.entries.reserve(spectrum.data.size());
  for (const auto& d : spectrum.data)
    s.entries.push_back({d.eigenvalue, heis::concentration_element(d),
                         static_cast<double>(d.multiplicity)});
  s.sort_and_check();
  return s;
}

}  // namespace srqe::weyl
