#pragma once

// Counting-function fits, Cesaro means and variances of diagonal matrix
// elements, the constructive Koopman-von Neumann density-one extraction,
// and the vertical/horizontal energy classification of eigenvectors.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "srqe/heisenberg_spectrum.hpp"
#include "srqe/sparse_operator.hpp"

namespace srqe::weyl {

struct SeriesEntry {
  double eigenvalue = 0.0;
  double value = 0.0;
  double weight = 1.0;  // multiplicity weight; 1 for discretized data
};

struct MatrixElementSeries {
  std::vector<SeriesEntry> entries;  // eigenvalues nondecreasing
  std::string label;

  void sort_and_check();
};

struct WeylFit {
  double C = 0.0;
  double exponent = 0.0;
  double r2 = 1.0;
  double lambda_lo = 0.0, lambda_hi = 0.0;
};

// Least-squares fit of log N = log C + exponent*log(lambda) on a
// geometric grid of n_pts points in [lambda_lo, lambda_hi].
WeylFit weyl_fit(const std::function<double(double)>& counting, double lambda_lo,
                 double lambda_hi, int n_pts = 32);
WeylFit weyl_fit(const heis::SpectrumList& spectrum, double lambda_lo, double lambda_hi,
                 int n_pts = 32);
// Counting from a plain list of eigenvalues (e.g. assembled sector data).
WeylFit weyl_fit(const std::vector<double>& sorted_eigenvalues, double lambda_lo, double lambda_hi,
                 int n_pts = 32);

// (1/N(lambda)) sum_{lambda_n <= lambda} w_n v_n, weight-aware.
double cesaro_mean(const MatrixElementSeries& s, double lambda);
// (1/N(lambda)) sum_{lambda_n <= lambda} w_n |v_n - center|^2.
double variance(const MatrixElementSeries& s, double lambda, double center);

struct DensityOneSet {
  std::vector<std::uint8_t> kept;   // mask over indices
  double density_estimate = 0.0;    // #kept / N
  std::vector<std::int64_t> level_start;  // T_k for each reached level k
};

// Constructive Koopman-von Neumann extraction for a bounded nonnegative
// sequence: T_k is the first index after which the running Cesaro mean
// stays below 4^{-k}; for n >= T_k (active level k = max such), index n
// is kept iff u_n < 2^{-k}. Indices before T_0 are kept. If the Cesaro
// mean tends to 0 the kept set has density one and the kept subsequence
// tends to 0.
DensityOneSet kvn_extract(const std::vector<double>& values);

struct ClassifyResult {
  double sigma_fraction = 0.0;  // vertical / (vertical + horizontal) energy
  bool degenerate = false;      // both energies ~ 0 (constant vector)
};

// sigma near 1: concentration on the characteristic cone; near 0: on the
// unit co-sphere bundle.
ClassifyResult quantum_limit_classify(const std::vector<cplx>& eigvec,
                                      const SparseOperator& vertical_energy,
                                      const SparseOperator& horizontal_energy);

// Concentration series of the exact model (one representative element per
// (l, m) or (j, k) datum, weighted by its multiplicity).
MatrixElementSeries concentration_series(const heis::SpectrumList& spectrum);

}  // namespace srqe::weyl
