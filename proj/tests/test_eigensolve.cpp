#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "srqe/discretize.hpp"
#include "srqe/eigensolve.hpp"
#include "srqe/errors.hpp"
#include "srqe/util.hpp"

using namespace srqe;

namespace {

SparseOperator dirichlet_laplacian_1d(int n) {
  std::vector<SparseOperator::Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return SparseOperator::from_triplets(n, std::move(t), SparseOperator::Symmetry::real_symmetric);
}

SparseOperator random_hermitian(int n, std::uint64_t seed) {
  util::Rng rng(seed);
  std::vector<SparseOperator::Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, rng.uniform(-1.0, 1.0)});
    for (int j = i + 1; j < n; ++j)
      t.push_back({i, j, cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))});
  }
  return SparseOperator::from_triplets(n, std::move(t), SparseOperator::Symmetry::hermitian);
}

}  // namespace

TEST_CASE("2x2 hand-diagonalizable matrix") {
  auto op = SparseOperator::from_triplets(
      2, {{0, 0, 2.0}, {1, 1, 2.0}, {0, 1, 1.0}}, SparseOperator::Symmetry::real_symmetric);
  auto pairs = eigs::lanczos_lowest(op, 2, 1e-12, 1000, 0);
  CHECK(pairs[0].value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pairs[1].value == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("1D Dirichlet Laplacian: closed-form lowest five") {
  const int n = 50;
  auto op = dirichlet_laplacian_1d(n);
  auto pairs = eigs::lanczos_lowest(op, 5, 1e-10, 20000, 1);
  for (int j = 1; j <= 5; ++j) {
    double expect = 2.0 - 2.0 * std::cos(M_PI * j / (n + 1));
    CHECK(pairs[j - 1].value == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("residuals and pairwise orthogonality of returned vectors") {
  auto op = random_hermitian(40, 11);
  auto pairs = eigs::lanczos_lowest(op, 6, 1e-10, 20000, 2);
  for (const auto& e : pairs) CHECK(e.residual <= 1e-10);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      cplx d = 0.0;
      for (std::size_t r = 0; r < pairs[i].vector.size(); ++r)
        d += std::conj(pairs[i].vector[r]) * pairs[j].vector[r];
      CHECK(std::abs(d) < 1e-10);
    }
}

TEST_CASE("non-hermitian input rejected before iteration") {
  SparseOperator op;
  op.dim = 2;
  op.row_ptr = {0, 2, 4};
  op.col = {0, 1, 0, 1};
  op.val = {1.0, 2.0, 3.0, 4.0};  // asymmetric
  op.symmetry = SparseOperator::Symmetry::real_symmetric;
  CHECK_THROWS_AS((void)eigs::lanczos_lowest(op, 1, 1e-8, 100, 0), Error);
}

TEST_CASE("convergence failure carries Ritz data") {
  auto op = random_hermitian(60, 3);
  try {
    (void)eigs::lanczos_lowest(op, 5, 1e-14, 7, 0);  // absurd step cap
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(!e.ritz_values.empty());
    CHECK(e.ritz_values.size() == e.ritz_residuals.size());
  }
}

TEST_CASE("dense oracle: identity, trace identity, dimension cap") {
  auto id3 = SparseOperator::from_triplets(
      3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}}, SparseOperator::Symmetry::real_symmetric);
  auto vals = eigs::dense_eigenvalues(id3);
  for (double v : vals) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  auto op = random_hermitian(20, 4);
  auto all = eigs::dense_eigenvalues(op);
  double sum = 0.0;
  for (double v : all) sum += v;
  CHECK(sum == doctest::Approx(op.trace().real()).epsilon(1e-10));

  CHECK_THROWS_AS((void)eigs::dense_eig(random_hermitian(20, 5), 10), Error);
}

TEST_CASE("lanczos agrees with the dense oracle on a sector operator") {
  ContactModel flat;
  auto op = grid::build_sector_operator(flat, 2, 48);
  auto lz = eigs::lanczos_lowest(op, 6, 1e-10, 200000, 6);
  auto dn = eigs::dense_eigenvalues(op);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(lz[i].value - dn[i]) < 1e-9);
}

TEST_CASE("dense oracle confirms the Landau cluster at m=1, n=24") {
  ContactModel flat;
  auto vals = eigs::dense_eigenvalues(grid::build_sector_operator(flat, 1, 24));
  CHECK(vals[0] == doctest::Approx(1.0).epsilon(0.02));
  auto lz = eigs::lanczos_lowest(grid::build_sector_operator(flat, 1, 24), 3, 1e-9, 100000, 7);
  CHECK(lz[0].value == doctest::Approx(vals[0]).epsilon(1e-9));
}

TEST_CASE("Ritz values from a growing Krylov subspace bound eigenvalues from above") {
  // Interlacing: the lowest Ritz value is non-increasing as the subspace
  // grows. Emulated by running lanczos with increasing k on a fixed op.
  auto op = random_hermitian(80, 12);
  auto exact = eigs::dense_eigenvalues(op);
  auto pairs = eigs::lanczos_lowest(op, 8, 1e-11, 40000, 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(pairs[i].value == doctest::Approx(exact[i]).epsilon(1e-9));
    CHECK(pairs[i].value >= exact[i] - 1e-9);  // variational upper bounds
  }
}

TEST_CASE("deterministic for a fixed seed") {
  auto op = random_hermitian(50, 9);
  auto a = eigs::lanczos_lowest(op, 4, 1e-10, 20000, 42);
  auto b = eigs::lanczos_lowest(op, 4, 1e-10, 20000, 42);
  for (int i = 0; i < 4; ++i) CHECK(a[i].value == b[i].value);
}

TEST_CASE("gap-based cluster counting recovers Landau degeneracies") {
  ContactModel flat;
  for (int m : {1, 2, 3}) {
    auto op = grid::build_sector_operator(flat, m, 32);
    auto pairs = eigs::lanczos_lowest(op, m + 2, 1e-9, 200000, 100 + m);
    std::vector<double> vals;
    for (const auto& e : pairs) vals.push_back(e.value);
    CHECK(eigs::lowest_cluster_size(vals) == m);
  }
}
