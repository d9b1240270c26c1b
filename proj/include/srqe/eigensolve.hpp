#pragma once

// Lowest eigenpairs of hermitian sparse operators.
//
// lanczos_lowest runs Lanczos with full reorthogonalization; converged
// pairs are locked and the iteration restarts with a fresh seeded random
// vector orthogonal to everything locked, which recovers degenerate
// clusters (Landau levels) reliably. dense_eig is the oracle path.

#include <complex>
#include <vector>

#include "srqe/sparse_operator.hpp"

namespace srqe::eigs {

struct EigenPair {
  double value = 0.0;
  std::vector<cplx> vector;  // unit norm
  double residual = 0.0;     // ||A v - value v||
};

// k lowest eigenpairs, values ascending, each residual <= tol.
// max_iter caps the total number of Lanczos steps across restarts.
// Deterministic for a fixed seed when run single-threaded.
// Throws ConvergenceError (with the best Ritz data) on stagnation and
// ErrorKind::domain if the operator is not hermitian as stored.
std::vector<EigenPair> lanczos_lowest(const SparseOperator& op, int k, double tol = 1e-9,
                                      int max_iter = 100000, std::uint64_t seed = 0);

// Full spectrum by dense hermitian diagonalization; dimension capped.
std::vector<EigenPair> dense_eig(const SparseOperator& op, std::size_t dim_cap = 4096);

// Values only (ascending), convenience wrappers.
std::vector<double> dense_eigenvalues(const SparseOperator& op, std::size_t dim_cap = 4096);

// Size of the lowest cluster under a relative gap threshold: the first
// index i with values[i+1]-values[i] > rel_gap * max(|values[i+1]|, scale)
// bounds the cluster.
int lowest_cluster_size(const std::vector<double>& values, double rel_gap = 0.2);

}  // namespace srqe::eigs
