#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "mhdfem/sparse.hpp"

using namespace mhdfem;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& d) {
  SparseMatrix s = d.sparseView();
  s.makeCompressed();
  return s;
}

}  // namespace

TEST(LuSolve, Identity) {
  SparseMatrix eye(4, 4);
  eye.setIdentity();
  const Vector b = Vector::LinSpaced(4, 1.0, 4.0);
  EXPECT_EQ((lu_solve(eye, b) - b).norm(), 0.0);
}

TEST(LuSolve, HandElimination) {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 1, 3;
  const Vector x = lu_solve(from_dense(a), Vector((Vector(2) << 3, 5).finished()));
  EXPECT_NEAR(x[0], 0.8, 1e-15);
  EXPECT_NEAR(x[1], 1.4, 1e-15);
}

TEST(LuSolve, RandomSpdResidual) {
  testkit::Rng rng(11);
  Eigen::MatrixXd r(50, 50);
  for (int i = 0; i < 50; ++i) r.row(i) = rng.vector(50).transpose();
  const Eigen::MatrixXd a = r * r.transpose() + 50.0 * Eigen::MatrixXd::Identity(50, 50);
  const Vector b = rng.vector(50);
  const SparseMatrix s = from_dense(a);
  const Vector x = lu_solve(s, b);
  EXPECT_LE((s * x - b).norm(), 1e-12 * (1 + b.norm()));
  const SpdSolver spd(s);
  EXPECT_LE((s * spd.solve(b) - b).norm(), 1e-12 * (1 + b.norm()));
}

TEST(LuSolve, SingularAndMismatch) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 2, 4;
  EXPECT_THROW((void)lu_solve(from_dense(a), Vector::Ones(2)), SolverError);
  EXPECT_THROW((void)lu_solve(from_dense(Eigen::MatrixXd::Identity(2, 2)), Vector::Ones(3)), UsageError);
}

TEST(SparseLu, WorkspaceReusesAnalysis) {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 4, 1, 0, 1, 4;
  SparseLu lu;
  EXPECT_FALSE(lu.analyzed());
  lu.compute(from_dense(a));
  EXPECT_TRUE(lu.analyzed());
  const Vector b(Vector::Ones(3));
  EXPECT_LE((a * lu.solve(b) - b).norm(), 1e-14);
  lu.factorize(from_dense(2.0 * a));
  EXPECT_LE((2.0 * a * lu.solve(b) - b).norm(), 1e-14);
}

TEST(Newton, AffineConvergesInOneIteration) {
  const Vector c = Vector::LinSpaced(5, -2.0, 2.0);
  const ResidualFn res = [&](const Vector& x, Vector& r) {
    r = x - c;
    return true;
  };
  const NewtonResult out = newton_solve(res, Vector::Zero(5), NewtonSettings{});
  EXPECT_EQ(out.iterations, 1);
  EXPECT_LE((out.x - c).norm(), 1e-12);
}

TEST(Newton, ScalarQuadratic) {
  const ResidualFn res = [](const Vector& x, Vector& r) {
    r[0] = x[0] * x[0] - 4.0;
    return true;
  };
  const NewtonResult out = newton_solve(res, Vector::Constant(1, 3.0), NewtonSettings{});
  EXPECT_LE(out.iterations, 6);
  EXPECT_NEAR(out.x[0], 2.0, 1e-11);
}

TEST(Newton, ZeroInitialResidualTakesNoIteration) {
  const ResidualFn res = [](const Vector& x, Vector& r) {
    r = x;
    return true;
  };
  EXPECT_EQ(newton_solve(res, Vector::Zero(3), NewtonSettings{}).iterations, 0);
}

TEST(Newton, LineSearchRespectsAdmissibility) {
  // log x = 0 from x0 = 10: the full Newton step lands at x < 0.
  int rejected = 0;
  const ResidualFn res = [&](const Vector& x, Vector& r) {
    if (!(x[0] > 0.0)) {
      ++rejected;
      return false;
    }
    r[0] = std::log(x[0]);
    return true;
  };
  const NewtonResult out = newton_solve(res, Vector::Constant(1, 10.0), NewtonSettings{});
  EXPECT_NEAR(out.x[0], 1.0, 1e-10);
  EXPECT_GT(rejected, 0);
}

TEST(Newton, NonConvergenceCarriesBestIterate) {
  // x^2 + 1 has no real root.
  const ResidualFn res = [](const Vector& x, Vector& r) {
    r[0] = x[0] * x[0] + 1.0;
    return true;
  };
  NewtonSettings s;
  s.max_iter = 5;
  try {
    (void)newton_solve(res, Vector::Constant(1, 2.0), s);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    EXPECT_EQ(e.best_iterate.size(), 1);
    EXPECT_GE(e.best_residual_norm, 1.0);
    EXPECT_LT(e.best_residual_norm, 5.0);
  }
}

TEST(Newton, SettingsValidation) {
  NewtonSettings s;
  s.abs_tol = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = NewtonSettings{};
  s.max_iter = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_DOUBLE_EQ(NewtonSettings{}.abs_tol, 1e-11);
}

TEST(FdJacobian, ColouredMatchesDenseAndAnalytic) {
  // Tridiagonal nonlinear system r_i = x_i^3 - x_{i-1} - x_{i+1} + i.
  const int n = 12;
  const ResidualFn res = [n](const Vector& x, Vector& r) {
    for (int i = 0; i < n; ++i)
      r[i] = x[i] * x[i] * x[i] - (i > 0 ? x[i - 1] : 0.0) - (i + 1 < n ? x[i + 1] : 0.0) + i;
    return true;
  };
  SparsityPattern pat{n, n, std::vector<std::vector<int>>(n)};
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - 1); i <= std::min(n - 1, j + 1); ++i) pat.col_rows[j].push_back(i);
  int ncolors = 0;
  const auto colors = color_columns(pat, &ncolors);
  EXPECT_EQ(ncolors, 3);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (colors[j] == colors[k])
        for (int i : pat.col_rows[j])
          for (int l : pat.col_rows[k]) EXPECT_NE(i, l);

  testkit::Rng rng(2);
  const Vector x = rng.vector(n);
  Vector r0(n);
  res(x, r0);
  const SparseMatrix jc = fd_jacobian(res, x, r0, 1e-7, &pat, &colors);
  const SparseMatrix jd = fd_jacobian(res, x, r0, 1e-7);
  Eigen::MatrixXd exact = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    exact(i, i) = 3 * x[i] * x[i];
    if (i > 0) exact(i, i - 1) = -1;
    if (i + 1 < n) exact(i, i + 1) = -1;
  }
  EXPECT_LE((Eigen::MatrixXd(jc) - exact).norm(), 1e-5);
  EXPECT_LE((Eigen::MatrixXd(jd) - Eigen::MatrixXd(jc)).norm(), 1e-12);
}
