#pragma once

#include <complex>
#include <cstdint>
#include <ostream>
#include <vector>

namespace srqe {

using cplx = std::complex<double>;

// Row-compressed hermitian matrix. Assembly goes through from_triplets,
// which accumulates duplicates and then enforces entry-level hermiticity
// by mirroring the upper triangle, so entry(i,j) == conj(entry(j,i))
// holds exactly as stored.
struct SparseOperator {
  enum class Symmetry { real_symmetric, hermitian };

  std::size_t dim = 0;
  std::vector<std::int64_t> row_ptr;  // size dim+1
  std::vector<std::int32_t> col;
  std::vector<cplx> val;
  Symmetry symmetry = Symmetry::real_symmetric;

  std::size_t nnz() const { return val.size(); }

  struct Triplet {
    std::int32_t row;
    std::int32_t col;
    cplx value;
  };

  static SparseOperator from_triplets(std::size_t dim, std::vector<Triplet> entries,
                                      Symmetry symmetry, double drop_tol = 0.0);

  void matvec(const cplx* x, cplx* y) const;
  std::vector<cplx> apply(const std::vector<cplx>& x) const;

  cplx entry(std::size_t i, std::size_t j) const;  // 0 if not stored
  bool is_hermitian_exact() const;                 // entrywise check
  double one_norm() const;
  cplx trace() const;

  // Matrix Market coordinate text (lower triangle, symmetric/hermitian).
  void export_matrix_market(std::ostream& out) const;
};

}  // namespace srqe
