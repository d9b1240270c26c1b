#include "srqe/sparse_operator.hpp"

#include <algorithm>
#include <cmath>

#include "srqe/errors.hpp"
#include "srqe/util.hpp"

namespace srqe {

SparseOperator SparseOperator::from_triplets(std::size_t dim, std::vector<Triplet> entries,
                                             Symmetry symmetry, double drop_tol) {
  for (const auto& t : entries)
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= dim ||
        static_cast<std::size_t>(t.col) >= dim)
      throw Error(ErrorKind::domain, "from_triplets: index out of range");

  // Accumulate duplicates at their literal positions.
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Triplet> acc;
  acc.reserve(entries.size());
  for (const auto& t : entries) {
    if (!acc.empty() && acc.back().row == t.row && acc.back().col == t.col)
      acc.back().value += t.value;
    else
      acc.push_back(t);
  }

  auto find_acc = [&](std::int32_t r, std::int32_t c) -> const Triplet* {
    Triplet probe{r, c, 0.0};
    auto it = std::lower_bound(acc.begin(), acc.end(), probe, [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    if (it != acc.end() && it->row == r && it->col == c) return &*it;
    return nullptr;
  };

  // Enforce hermiticity entry-by-entry: when both sides of a pair were
  // assembled, their (exact for consistent assembly) average is stored;
  // a single-sided entry is mirrored. Diagonal keeps its real part.
  std::vector<Triplet> full;
  full.reserve(2 * acc.size());
  for (const auto& t : acc) {
    if (t.row == t.col) {
      full.push_back({t.row, t.col, cplx(t.value.real(), 0.0)});
    } else if (t.row < t.col) {
      cplx v = t.value;
      if (const Triplet* low = find_acc(t.col, t.row)) v = 0.5 * (v + std::conj(low->value));
      if (drop_tol > 0.0 && std::abs(v) <= drop_tol) continue;
      full.push_back({t.row, t.col, v});
      full.push_back({t.col, t.row, std::conj(v)});
    } else {
      if (find_acc(t.col, t.row)) continue;  // handled from the upper side
      cplx v = t.value;
      if (drop_tol > 0.0 && std::abs(v) <= drop_tol) continue;
      full.push_back({t.col, t.row, std::conj(v)});
      full.push_back({t.row, t.col, v});
    }
  }
  std::sort(full.begin(), full.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseOperator op;
  op.dim = dim;
  op.symmetry = symmetry;
  op.row_ptr.assign(dim + 1, 0);
  op.col.reserve(full.size());
  op.val.reserve(full.size());
  for (const auto& t : full) {
    op.row_ptr[static_cast<std::size_t>(t.row) + 1]++;
    op.col.push_back(t.col);
    op.val.push_back(t.value);
  }
  for (std::size_t i = 0; i < dim; ++i) op.row_ptr[i + 1] += op.row_ptr[i];
  return op;
}

void SparseOperator::matvec(const cplx* x, cplx* y) const {
  util::parallel_for(
      dim,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          cplx acc = 0.0;
          for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
            acc += val[p] * x[col[p]];
          y[i] = acc;
        }
      },
      0);
}

std::vector<cplx> SparseOperator::apply(const std::vector<cplx>& x) const {
  if (x.size() != dim) throw Error(ErrorKind::domain, "apply: size mismatch");
  std::vector<cplx> y(dim);
  matvec(x.data(), y.data());
  return y;
}

cplx SparseOperator::entry(std::size_t i, std::size_t j) const {
  for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
    if (static_cast<std::size_t>(col[p]) == j) return val[p];
  return 0.0;
}

bool SparseOperator::is_hermitian_exact() const {
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      std::size_t j = static_cast<std::size_t>(col[p]);
      if (j == i) {
        if (val[p].imag() != 0.0) return false;
        continue;
      }
      if (entry(j, i) != std::conj(val[p])) return false;
    }
  }
  return true;
}

double SparseOperator::one_norm() const {
  std::vector<double> colsum(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
      colsum[col[p]] += std::abs(val[p]);
  double mx = 0.0;
  for (double c : colsum) mx = std::max(mx, c);
  return mx;
}

cplx SparseOperator::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
      if (static_cast<std::size_t>(col[p]) == i) t += val[p];
  return t;
}

void SparseOperator::export_matrix_market(std::ostream& out) const {
  bool complex_fmt = symmetry == Symmetry::hermitian;
  out << "%%MatrixMarket matrix coordinate " << (complex_fmt ? "complex hermitian" : "real symmetric")
      << "\n";
  std::size_t lower = 0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
      if (static_cast<std::size_t>(col[p]) <= i) ++lower;
  out << dim << ' ' << dim << ' ' << lower << '\n';
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      if (static_cast<std::size_t>(col[p]) > i) continue;
      out << (i + 1) << ' ' << (col[p] + 1) << ' ' << util::fmt17(val[p].real());
      if (complex_fmt) out << ' ' << util::fmt17(val[p].imag());
      out << '\n';
    }
  }
}

}  // namespace srqe
