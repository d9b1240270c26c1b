#include "srqe/sector_assembly.hpp"

#include <algorithm>
#include <cmath>

#include "srqe/discretize.hpp"
#include "srqe/eigensolve.hpp"

namespace srqe::grid {

std::vector<double> assemble_sector_spectrum(const ContactModel& model, double lambda_max,
                                             int n_grid, double tol, std::uint64_t seed,
                                             int max_iter) {
  std::vector<double> eigenvalues;

  {
    SparseOperator op = build_torus_sector(model, n_grid);
    std::vector<double> vals;
    if (op.dim <= 1600) {
      vals = eigs::dense_eigenvalues(op, 4096);
    } else {
      int k = std::max(8, static_cast<int>(lambda_max / 2.0) + 8);
      for (const auto& e : eigs::lanczos_lowest(op, k, tol, max_iter, seed)) vals.push_back(e.value);
    }
    for (double v : vals)
      if (v <= lambda_max) eigenvalues.push_back(v);
  }

  int m_cap = static_cast<int>(std::floor(lambda_max * 1.15)) + 1;
  for (int m = 1; m <= m_cap; ++m) {
    // Levels (2l+1)m below the cutoff, with margin for the perturbation;
    // each level carries multiplicity m.
    int levels = static_cast<int>((lambda_max * 1.1 / m + 1.0) / 2.0) + 1;
    int k = std::min<int>(levels * m + m, static_cast<int>(lambda_max) + 8);
    if (k <= 0) break;
    SparseOperator op = build_sector_operator(model, m, n_grid);
    if (static_cast<std::size_t>(k) >= op.dim) k = static_cast<int>(op.dim) - 1;
    auto pairs = eigs::lanczos_lowest(op, k, tol, max_iter, seed + m);
    bool any = false;
    for (const auto& e : pairs)
      if (e.value <= lambda_max) {
        eigenvalues.push_back(e.value);
        eigenvalues.push_back(e.value);  // conjugate sector -m
        any = true;
      }
    if (!any) break;
  }
  std::sort(eigenvalues.begin(), eigenvalues.end());
  return eigenvalues;
}

}  // namespace srqe::grid
