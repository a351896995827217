#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "mhdfem/common.hpp"

namespace mhdfem {

/// Compressed sparse storage (column-major CSC; indices sorted and unique per column).
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Sparse LU solve. Throws SolverError when a pivot vanishes.
[[nodiscard]] Vector lu_solve(const SparseMatrix& a, const Vector& b);

/// Reusable sparse LU factorization (pattern analysed once, refactorized on demand).
class SparseLu {
 public:
  SparseLu();
  ~SparseLu();
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;

  void analyze(const SparseMatrix& a);
  void factorize(const SparseMatrix& a);
  void compute(const SparseMatrix& a) {
    analyze(a);
    factorize(a);
  }
  [[nodiscard]] Vector solve(const Vector& b) const;
  [[nodiscard]] bool analyzed() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Symmetric positive definite solve used for mass matrices.
class SpdSolver {
 public:
  SpdSolver();
  explicit SpdSolver(const SparseMatrix& a);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  [[nodiscard]] Vector solve(const Vector& b) const;
  [[nodiscard]] int size() const { return size_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int size_ = 0;
};

/// Column structure of a Jacobian: rows[j] lists the rows that column j can touch.
struct SparsityPattern {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<int>> col_rows;
};

/// Greedy distance-2 column colouring: columns of one colour share no row.
/// Returns the colour of every column.
[[nodiscard]] std::vector<int> color_columns(const SparsityPattern& pattern, int* num_colors = nullptr);

struct NewtonSettings {
  double abs_tol = 1e-11;
  double rel_tol = 1e-12;
  int max_iter = 50;
  double fd_scale = 1e-7;  // forward-difference step is fd_scale * (1 + |x_i|)
  int max_halvings = 8;

  void validate() const;
};

struct NewtonResult {
  Vector x;
  int iterations = 0;
  double final_residual = 0.0;
};

/// Thrown when Newton exhausts its iteration budget; carries the best iterate seen.
class NonConvergence : public SolverError {
 public:
  NonConvergence(const std::string& what, Vector best, double best_residual)
      : SolverError(what), best_iterate(std::move(best)), best_residual_norm(best_residual) {}
  Vector best_iterate;
  double best_residual_norm;
};

/// Residual callback. Writes R(x) into r (already sized). Returning false marks x as
/// inadmissible (e.g. nonpositive density); the line search then shortens the step.
using ResidualFn = std::function<bool(const Vector& x, Vector& r)>;

/// Finite-difference Jacobian of `residual` at x. With a pattern, columns are probed
/// by colour groups; without one every column is probed separately (dense pattern).
[[nodiscard]] SparseMatrix fd_jacobian(const ResidualFn& residual, const Vector& x, const Vector& r0,
                                       double fd_scale, const SparsityPattern* pattern = nullptr,
                                       const std::vector<int>* colors = nullptr);

/// Jacobian callback: receives the iterate and its residual.
using JacobianFn = std::function<SparseMatrix(const Vector& x, const Vector& r)>;

/// Damped Newton iteration with a finite-difference Jacobian and sparse LU.
[[nodiscard]] NewtonResult newton_solve(const ResidualFn& residual, const Vector& x0,
                                        const NewtonSettings& settings,
                                        const SparsityPattern* pattern = nullptr);

/// Same iteration with a caller-supplied Jacobian. A `workspace` asserts that every
/// Jacobian shares one sparsity structure: it is analysed on first use and kept, so
/// repeated solves (one per time step) only refactorize.
[[nodiscard]] NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                                        const Vector& x0, const NewtonSettings& settings,
                                        SparseLu* workspace = nullptr);

}  // namespace mhdfem
