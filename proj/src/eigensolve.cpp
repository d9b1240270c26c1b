#include "srqe/eigensolve.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "srqe/errors.hpp"
#include "srqe/util.hpp"

namespace srqe::eigs {

namespace {

using Vec = std::vector<cplx>;

double nrm(const Vec& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

cplx dot(const Vec& a, const Vec& b) {  // <a, b> conjugate-linear in a
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void axpy(Vec& y, cplx alpha, const Vec& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void scale(Vec& v, double s) {
  for (auto& z : v) z *= s;
}

// Two-pass classical Gram-Schmidt against a list of vectors.
void orthogonalize(Vec& v, const std::vector<const Vec*>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Vec* b : basis) axpy(v, -dot(*b, v), *b);
}

Vec random_unit(std::size_t n, util::Rng& rng, bool complex_valued) {
  Vec v(n);
  for (auto& z : v)
    z = complex_valued ? cplx(rng.normal(), rng.normal()) : cplx(rng.normal(), 0.0);
  double s = nrm(v);
  scale(v, 1.0 / s);
  return v;
}

}  // namespace

std::vector<EigenPair> lanczos_lowest(const SparseOperator& op, int k, double tol, int max_iter,
                                      std::uint64_t seed) {
  const std::size_t n = op.dim;
  if (k <= 0 || static_cast<std::size_t>(k) > n)
    throw Error(ErrorKind::domain, "lanczos_lowest: need 0 < k <= dim");
  if (!op.is_hermitian_exact())
    throw Error(ErrorKind::domain, "lanczos_lowest: operator is not hermitian as stored");

  const bool complex_valued = op.symmetry == SparseOperator::Symmetry::hermitian;
  util::Rng rng(seed + 0x5eed);

  std::vector<EigenPair> locked;
  int steps_used = 0;
  int barren_restarts = 0;
  std::vector<double> best_ritz, best_res;

  while (static_cast<int>(locked.size()) < k) {
    std::vector<const Vec*> locked_ptrs;
    locked_ptrs.reserve(locked.size());
    for (const auto& e : locked) locked_ptrs.push_back(&e.vector);

    // Fresh start vector orthogonal to the locked invariant subspace.
    Vec v = random_unit(n, rng, complex_valued);
    orthogonalize(v, locked_ptrs);
    double s = nrm(v);
    if (s < 1e-12) throw Error(ErrorKind::numeric, "lanczos_lowest: start vector collapsed");
    scale(v, 1.0 / s);

    std::vector<Vec> basis;
    std::vector<double> alpha, beta;
    basis.push_back(std::move(v));

    const int still_needed = k - static_cast<int>(locked.size());
    // The lowest eigenvalues of the stiff grid operators sit in a tiny
    // relative gap (unit spacing against a spectral radius ~ 1/h^2), so
    // the Krylov space must be allowed to grow into the hundreds.
    const int deep_cap = n >= 8192 ? 384 : 512;
    const int inner_cap = std::min<int>(static_cast<int>(n - locked.size()),
                                        std::max(4 * still_needed + 100, deep_cap));
    bool harvested = false;

    for (int j = 0; j < inner_cap && steps_used < max_iter; ++j, ++steps_used) {
      Vec w = op.apply(basis[j]);
      double a = dot(basis[j], w).real();
      alpha.push_back(a);
      // Full reorthogonalization against the Krylov basis and the locked
      // subspace; no selective shortcuts, ghost pairs are unacceptable
      // for counting experiments.
      std::vector<const Vec*> all = locked_ptrs;
      for (const auto& bb : basis) all.push_back(&bb);
      orthogonalize(w, all);
      double b = nrm(w);

      const bool breakdown = b < 1e-13 * std::max(1.0, std::abs(a));
      const bool last = breakdown || j + 1 == inner_cap || steps_used + 1 >= max_iter;

      if ((j >= 20 && j % 25 == 0) || last) {
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
          T(i, i) = alpha[i];
          if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const int want = std::min(m, still_needed);
        // Residual bound |beta_m s_{m,i}| for the Ritz pairs we need.
        bool bounds_ok = true;
        for (int i = 0; i < want; ++i)
          if (std::abs(b * es.eigenvectors()(m - 1, i)) > 0.1 * tol) bounds_ok = false;

        if (bounds_ok || last) {
          for (int i = 0; i < want; ++i) {
            Vec y(n, 0.0);
            for (int t2 = 0; t2 < m; ++t2) axpy(y, es.eigenvectors()(t2, i), basis[t2]);
            orthogonalize(y, locked_ptrs);
            double ny = nrm(y);
            if (ny < 1e-8) continue;
            scale(y, 1.0 / ny);
            Vec Ay = op.apply(y);
            double theta = dot(y, Ay).real();
            axpy(Ay, -cplx(theta), y);
            double res = nrm(Ay);
            if (res <= tol) {
              locked.push_back({theta, std::move(y), res});
              locked_ptrs.clear();
              for (const auto& e : locked) locked_ptrs.push_back(&e.vector);
              harvested = true;
            }
          }
          if (last && !harvested) {
            best_ritz.assign(es.eigenvalues().data(), es.eigenvalues().data() + want);
            best_res.clear();
            for (int i = 0; i < want; ++i)
              best_res.push_back(std::abs(b * es.eigenvectors()(m - 1, i)));
          }
          if (harvested) break;
        }
      }

      if (breakdown) break;
      beta.push_back(b);
      scale(w, 1.0 / b);
      basis.push_back(std::move(w));
    }

    if (harvested) {
      barren_restarts = 0;
      continue;
    }
    if (steps_used >= max_iter)
      throw ConvergenceError(
          "lanczos_lowest: no convergence within max_iter=" + std::to_string(max_iter), best_ritz,
          best_res);
    if (++barren_restarts > 4)
      throw ConvergenceError("lanczos_lowest: stagnated after repeated restarts", best_ritz,
                             best_res);
  }

  std::sort(locked.begin(), locked.end(),
            [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
  locked.resize(k);
  return locked;
}

std::vector<EigenPair> dense_eig(const SparseOperator& op, std::size_t dim_cap) {
  if (op.dim > dim_cap)
    throw Error(ErrorKind::resource, "dense_eig: dim " + std::to_string(op.dim) +
                                         " exceeds cap " + std::to_string(dim_cap));
  const std::size_t n = op.dim;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::int64_t p = op.row_ptr[i]; p < op.row_ptr[i + 1]; ++p) A(i, op.col[p]) = op.val[p];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::numeric, "dense_eig: diagonalization failed");

  std::vector<EigenPair> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].value = es.eigenvalues()[i];
    out[i].vector.resize(n);
    for (std::size_t r = 0; r < n; ++r) out[i].vector[r] = es.eigenvectors()(r, i);
    Vec Av = op.apply(out[i].vector);
    axpy(Av, -cplx(out[i].value), out[i].vector);
    out[i].residual = nrm(Av);
  }
  return out;
}

std::vector<double> dense_eigenvalues(const SparseOperator& op, std::size_t dim_cap) {
  if (op.dim > dim_cap)
    throw Error(ErrorKind::resource, "dense_eigenvalues: dim exceeds cap");
  const std::size_t n = op.dim;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::int64_t p = op.row_ptr[i]; p < op.row_ptr[i + 1]; ++p) A(i, op.col[p]) = op.val[p];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return v;
}

int lowest_cluster_size(const std::vector<double>& values, double rel_gap) {
  if (values.empty()) return 0;
  double scale = std::max(std::abs(values.front()), 1e-12);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    double ref = std::max(std::abs(values[i + 1]), scale);
    if (values[i + 1] - values[i] > rel_gap * ref) return static_cast<int>(i + 1);
  }
  return static_cast<int>(values.size());
}

}  // namespace srqe::eigs
