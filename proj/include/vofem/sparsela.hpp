#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <string>

#include "vofem/errors.hpp"

namespace vofem {

/// CSR storage for the symmetric FEM operators.
template <typename Scalar = double>
using CsrMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;
using SparseMatrix = CsrMatrix<double>;

template <typename Scalar = double>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Preconditioner { none, jacobi };
enum class SolverMethod { automatic, cg, tridiagonal };

struct SolverConfig {
  double rel_tol = 1e-11;
  int max_iters = 0;  ///< 0 selects 10 sqrt(n) + 100
  Preconditioner preconditioner = Preconditioner::jacobi;
  SolverMethod method = SolverMethod::automatic;
};

template <typename Scalar = double>
struct SolveResult {
  Vector<Scalar> x;
  int iterations = 0;
  double residual = 0.0;  ///< ||A x - b|| / ||b||, Euclidean
};

inline int default_max_iters(Eigen::Index n) { return int(10.0 * std::sqrt(double(n)) + 100.0); }

/// Preconditioned conjugate gradients. Stops on the Euclidean relative
/// residual; the recurrence residual is re-anchored to b - A x before
/// declaring convergence, so the returned residual is the true one.
template <typename Scalar>
SolveResult<Scalar> cg_solve(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b, const SolverConfig& cfg,
                             const Vector<Scalar>* guess = nullptr) {
  if (!(cfg.rel_tol > 0.0)) throw DomainError("cg_solve: rel_tol must be positive");
  const Eigen::Index n = b.size();
  if (A.rows() != n || A.cols() != n) throw LengthError("cg_solve: dimension mismatch");
  const int max_iters = cfg.max_iters > 0 ? cfg.max_iters : default_max_iters(n);

  SolveResult<Scalar> out;
  const Scalar bnorm = b.norm();
  if (bnorm == Scalar(0)) {
    out.x = Vector<Scalar>::Zero(n);
    return out;
  }

  Vector<Scalar> inv_diag = Vector<Scalar>::Ones(n);
  if (cfg.preconditioner == Preconditioner::jacobi) {
    inv_diag = A.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(inv_diag(i) > Scalar(0))) throw SolverError("cg_solve: non-positive diagonal entry", 1.0, 0);
      inv_diag(i) = Scalar(1) / inv_diag(i);
    }
  }

  out.x = guess ? *guess : Vector<Scalar>::Zero(n);
  Vector<Scalar> r = b;
  if (guess) r.noalias() -= A * out.x;
  const Scalar tol = Scalar(cfg.rel_tol) * bnorm;

  Vector<Scalar> z = inv_diag.cwiseProduct(r);
  Vector<Scalar> p = z;
  Vector<Scalar> q(n);
  Scalar rz = r.dot(z);
  Scalar rnorm = r.norm();
  int it = 0;
  while (true) {
    if (rnorm <= tol) {
      // confirm against the true residual
      r = b;
      r.noalias() -= A * out.x;
      rnorm = r.norm();
      if (rnorm <= tol) break;
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
    }
    if (it >= max_iters) break;
    q.noalias() = A * p;
    const Scalar pq = p.dot(q);
    if (!(pq > Scalar(0))) throw SolverError("cg_solve: matrix is not positive definite", double(rnorm / bnorm), it);
    const Scalar step = rz / pq;
    out.x += step * p;
    r -= step * q;
    z = inv_diag.cwiseProduct(r);
    const Scalar rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    rnorm = r.norm();
    ++it;
  }
  out.iterations = it;
  out.residual = double(rnorm / bnorm);
  if (rnorm > tol)
    throw SolverError("cg_solve: no convergence after " + std::to_string(it) + " iterations, residual " +
                          std::to_string(out.residual),
                      out.residual, it);
  return out;
}

/// Tridiagonal view: lower(i) = A(i+1, i), upper(i) = A(i, i+1).
template <typename Scalar = double>
struct Tridiagonal {
  Vector<Scalar> lower;
  Vector<Scalar> diag;
  Vector<Scalar> upper;
};

/// Extracts the three diagonals; throws if A has entries further out.
template <typename Scalar>
Tridiagonal<Scalar> tridiagonal_view(const CsrMatrix<Scalar>& A) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw LengthError("tridiagonal_view: matrix must be square");
  Tridiagonal<Scalar> t{Vector<Scalar>::Zero(std::max<Eigen::Index>(n - 1, 0)), Vector<Scalar>::Zero(n),
                        Vector<Scalar>::Zero(std::max<Eigen::Index>(n - 1, 0))};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (typename CsrMatrix<Scalar>::InnerIterator it(A, i); it; ++it) {
      const Eigen::Index j = it.col();
      if (j == i) t.diag(i) += it.value();
      else if (j == i + 1) t.upper(i) += it.value();
      else if (j == i - 1) t.lower(j) += it.value();
      else if (it.value() != Scalar(0)) throw DomainError("tridiagonal_view: matrix is not tridiagonal");
    }
  }
  return t;
}

template <typename Scalar>
bool is_tridiagonal(const CsrMatrix<Scalar>& A) {
  for (Eigen::Index i = 0; i < A.outerSize(); ++i)
    for (typename CsrMatrix<Scalar>::InnerIterator it(A, i); it; ++it)
      if (std::abs(it.col() - i) > 1 && it.value() != Scalar(0)) return false;
  return true;
}

/// Thomas algorithm.
template <typename Scalar>
Vector<Scalar> tri_solve(const Tridiagonal<Scalar>& A, const Vector<Scalar>& b) {
  const Eigen::Index n = A.diag.size();
  if (b.size() != n) throw LengthError("tri_solve: dimension mismatch");
  Vector<Scalar> c(n), x(n);
  if (n == 0) return x;
  Scalar pivot = A.diag(0);
  if (pivot == Scalar(0)) throw SolverError("tri_solve: zero pivot at row 0", 1.0, 0);
  x(0) = b(0) / pivot;
  for (Eigen::Index i = 1; i < n; ++i) {
    c(i - 1) = A.upper(i - 1) / pivot;
    pivot = A.diag(i) - A.lower(i - 1) * c(i - 1);
    if (pivot == Scalar(0)) throw SolverError("tri_solve: zero pivot at row " + std::to_string(i), 1.0, 0);
    x(i) = (b(i) - A.lower(i - 1) * x(i - 1)) / pivot;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c(i) * x(i + 1);
  return x;
}

/// Dispatches on cfg.method; automatic picks Thomas for tridiagonal A.
template <typename Scalar>
SolveResult<Scalar> linear_solve(const CsrMatrix<Scalar>& A, const Vector<Scalar>& b, const SolverConfig& cfg,
                                 const Vector<Scalar>* guess = nullptr) {
  const bool direct = cfg.method == SolverMethod::tridiagonal ||
                      (cfg.method == SolverMethod::automatic && is_tridiagonal(A));
  if (!direct) return cg_solve(A, b, cfg, guess);
  SolveResult<Scalar> out;
  out.x = tri_solve(tridiagonal_view(A), b);
  const Scalar bnorm = b.norm();
  out.residual = bnorm == Scalar(0) ? 0.0 : double((A * out.x - b).norm() / bnorm);
  if (!(out.residual <= cfg.rel_tol))
    throw SolverError("tri_solve: residual above tolerance", out.residual, 0);
  return out;
}

}  // namespace vofem
