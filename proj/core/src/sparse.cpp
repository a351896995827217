#include "mhdfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace mhdfem {

struct SparseLu::Impl {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
};

SparseLu::SparseLu() : impl_(std::make_unique<Impl>()) {}
SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

void SparseLu::analyze(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw UsageError("LU requires a square matrix");
  impl_->lu.analyzePattern(a);
  impl_->analyzed = true;
}

void SparseLu::factorize(const SparseMatrix& a) {
  if (!impl_->analyzed) analyze(a);
  impl_->lu.factorize(a);
  if (impl_->lu.info() != Eigen::Success)
    throw SolverError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
}

bool SparseLu::analyzed() const { return impl_->analyzed; }

Vector SparseLu::solve(const Vector& b) const {
  Vector x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
  return x;
}

Vector lu_solve(const SparseMatrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw UsageError("lu_solve: dimension mismatch");
  SparseMatrix ac = a;
  ac.makeCompressed();
  SparseLu lu;
  lu.compute(ac);
  return lu.solve(b);
}

struct SpdSolver::Impl {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

SpdSolver::SpdSolver() : impl_(std::make_unique<Impl>()) {}
SpdSolver::SpdSolver(const SparseMatrix& a) : impl_(std::make_unique<Impl>()), size_(static_cast<int>(a.rows())) {
  if (a.rows() == 0) return;
  impl_->ldlt.compute(a);
  if (impl_->ldlt.info() != Eigen::Success) throw SolverError("mass matrix factorization failed");
}
SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Vector SpdSolver::solve(const Vector& b) const {
  if (b.size() != size_) throw UsageError("SpdSolver: dimension mismatch");
  if (size_ == 0) return Vector();
  return impl_->ldlt.solve(b);
}

std::vector<int> color_columns(const SparsityPattern& pattern, int* num_colors) {
  std::vector<std::vector<int>> row_cols(pattern.rows);
  for (int j = 0; j < pattern.cols; ++j)
    for (int i : pattern.col_rows[j]) row_cols[i].push_back(j);

  std::vector<int> color(pattern.cols, -1);
  std::vector<int> stamp;
  int ncolors = 0;
  for (int j = 0; j < pattern.cols; ++j) {
    for (int i : pattern.col_rows[j])
      for (int k : row_cols[i])
        if (color[k] >= 0) stamp[color[k]] = j + 1;
    int c = 0;
    while (c < ncolors && stamp[c] == j + 1) ++c;
    if (c == ncolors) {
      ++ncolors;
      stamp.push_back(0);
    }
    color[j] = c;
  }
  if (num_colors) *num_colors = ncolors;
  return color;
}

void NewtonSettings::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("Newton tolerances must be > 0");
  if (max_iter < 1) throw ConfigError("Newton max_iter must be >= 1");
  if (!(fd_scale > 0.0)) throw ConfigError("finite-difference scale must be > 0");
  if (max_halvings < 0) throw ConfigError("max_halvings must be >= 0");
}

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

// Power of two, so that x + h is exact for moderate x and affine residuals difference exactly.
double fd_step(double scale, double xj) { return std::exp2(std::round(std::log2(scale * (1.0 + std::abs(xj))))); }

}  // namespace

SparseMatrix fd_jacobian(const ResidualFn& residual, const Vector& x, const Vector& r0, double fd_scale,
                         const SparsityPattern* pattern, const std::vector<int>* colors) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(r0.size());
  std::vector<Triplet> trip;
  Vector xp = x;
  Vector rp(m);

  auto probe = [&](const std::vector<int>& cols, std::vector<double>& steps) {
    for (std::size_t k = 0; k < cols.size(); ++k) xp[cols[k]] = x[cols[k]] + steps[k];
    bool ok = residual(xp, rp) && all_finite(rp);
    if (!ok) {
      for (std::size_t k = 0; k < cols.size(); ++k) {
        steps[k] = -steps[k];
        xp[cols[k]] = x[cols[k]] + steps[k];
      }
      ok = residual(xp, rp) && all_finite(rp);
    }
    for (int j : cols) xp[j] = x[j];
    if (!ok) throw SolverError("residual inadmissible around the current Newton iterate");
  };

  if (pattern == nullptr) {
    std::vector<int> one(1);
    std::vector<double> step(1);
    for (int j = 0; j < n; ++j) {
      one[0] = j;
      step[0] = fd_step(fd_scale, x[j]);
      probe(one, step);
      for (int i = 0; i < m; ++i) {
        const double v = (rp[i] - r0[i]) / step[0];
        if (v != 0.0) trip.emplace_back(i, j, v);
      }
    }
  } else {
    std::vector<int> local_colors;
    if (colors == nullptr) {
      local_colors = color_columns(*pattern);
      colors = &local_colors;
    }
    int ncolors = 0;
    for (int c : *colors) ncolors = std::max(ncolors, c + 1);
    std::vector<std::vector<int>> groups(ncolors);
    for (int j = 0; j < n; ++j) groups[(*colors)[j]].push_back(j);
    std::size_t nnz = 0;
    for (const auto& rows : pattern->col_rows) nnz += rows.size();
    trip.reserve(nnz);
    std::vector<double> steps;
    for (const auto& group : groups) {
      steps.resize(group.size());
      for (std::size_t k = 0; k < group.size(); ++k) steps[k] = fd_step(fd_scale, x[group[k]]);
      probe(group, steps);
      for (std::size_t k = 0; k < group.size(); ++k) {
        const int j = group[k];
        for (int i : pattern->col_rows[j]) trip.emplace_back(i, j, (rp[i] - r0[i]) / steps[k]);
      }
    }
  }
  SparseMatrix jac(m, n);
  jac.setFromTriplets(trip.begin(), trip.end());
  jac.makeCompressed();
  return jac;
}

NewtonResult newton_solve(const ResidualFn& residual, const Vector& x0, const NewtonSettings& settings,
                          const SparsityPattern* pattern) {
  std::vector<int> colors;
  if (pattern) colors = color_columns(*pattern);
  const JacobianFn jac = [&](const Vector& x, const Vector& r) {
    return fd_jacobian(residual, x, r, settings.fd_scale, pattern, pattern ? &colors : nullptr);
  };
  SparseLu lu;
  return newton_solve(residual, jac, x0, settings, pattern ? &lu : nullptr);
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, const Vector& x0,
                          const NewtonSettings& settings, SparseLu* workspace) {
  settings.validate();
  Vector x = x0;
  Vector r(x0.size());
  if (!residual(x, r) || !all_finite(r)) throw SolverError("initial Newton iterate is inadmissible");
  const double norm0 = r.norm();
  double norm = norm0;
  Vector best = x;
  double best_norm = norm;

  SparseLu local;
  SparseLu& lu = workspace ? *workspace : local;
  Vector xt(x.size());
  Vector rt(r.size());
  for (int iter = 0;; ++iter) {
    if (norm <= settings.abs_tol || norm <= settings.rel_tol * norm0) return {x, iter, norm};
    if (iter == settings.max_iter)
      throw NonConvergence("Newton did not converge in " + std::to_string(settings.max_iter) +
                               " iterations (residual " + std::to_string(norm) + ")",
                           best, best_norm);

    const SparseMatrix jac = jacobian(x, r);
    if (!workspace || !lu.analyzed()) lu.analyze(jac);
    lu.factorize(jac);
    const Vector dx = lu.solve(-r);

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= settings.max_halvings; ++h, step *= 0.5) {
      xt = x + step * dx;
      if (residual(xt, rt) && all_finite(rt) && rt.norm() < norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NonConvergence("Newton line search failed to reduce the residual (" + std::to_string(norm) + ")",
                           best, best_norm);
    x = xt;
    r = rt;
    norm = r.norm();
    if (norm < best_norm) {
      best = x;
      best_norm = norm;
    }
  }
}

}  // namespace mhdfem
