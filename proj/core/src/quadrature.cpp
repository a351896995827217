#include "mhdfem/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace mhdfem {

void gauss_jacobi(int n, double alpha, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw UsageError("quadrature needs at least one point");
  // Golub-Welsch on the monic Jacobi recurrence for (1-t)^alpha on [-1,1].
  const double beta = 0.0;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + alpha + beta;
    jac(k, k) = k == 0 ? (beta - alpha) / (alpha + beta + 2.0)
                       : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1.0;
      const double sm = 2.0 * m + alpha + beta;
      const double b = 4.0 * m * (m + alpha) * (m + beta) * (m + alpha + beta) /
                       (sm * sm * (sm + 1.0) * (sm - 1.0));
      jac(k, k + 1) = jac(k + 1, k) = std::sqrt(b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  const double mu0 = std::pow(2.0, alpha + beta + 1.0) * std::tgamma(alpha + 1.0) *
                     std::tgamma(beta + 1.0) / std::tgamma(alpha + beta + 2.0);
  nodes.resize(n);
  weights.resize(n);
  const double scale = std::pow(2.0, -alpha - 1.0);
  for (int k = 0; k < n; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    nodes[k] = 0.5 * (1.0 + eig.eigenvalues()(k));
    weights[k] = mu0 * v0 * v0 * scale;
  }
}

QuadratureRule simplex_rule(int dim, int n) {
  QuadratureRule rule;
  rule.dim = dim;
  rule.degree = 2 * n - 1;
  std::vector<double> xa, wa, xb, wb, xc, wc;
  if (dim == 1) {
    gauss_jacobi(n, 0.0, xa, wa);
    for (int i = 0; i < n; ++i) {
      rule.points.push_back(Bary(1.0 - xa[i], xa[i], 0.0, 0.0));
      rule.weights.push_back(wa[i]);
    }
  } else if (dim == 2) {
    gauss_jacobi(n, 1.0, xa, wa);
    gauss_jacobi(n, 0.0, xb, wb);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double x1 = xa[i];
        const double x2 = xb[j] * (1.0 - xa[i]);
        rule.points.push_back(Bary(1.0 - x1 - x2, x1, x2, 0.0));
        rule.weights.push_back(2.0 * wa[i] * wb[j]);
      }
  } else if (dim == 3) {
    gauss_jacobi(n, 2.0, xa, wa);
    gauss_jacobi(n, 1.0, xb, wb);
    gauss_jacobi(n, 0.0, xc, wc);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double x1 = xa[i];
          const double x2 = xb[j] * (1.0 - xa[i]);
          const double x3 = xc[k] * (1.0 - xa[i]) * (1.0 - xb[j]);
          rule.points.push_back(Bary(1.0 - x1 - x2 - x3, x1, x2, x3));
          rule.weights.push_back(6.0 * wa[i] * wb[j] * wc[k]);
        }
  } else {
    throw UsageError("simplex_rule: dimension must be 1, 2 or 3");
  }
  return rule;
}

const QuadratureRule& cell_rule(int dim) {
  static const QuadratureRule r2 = simplex_rule(2, 3);
  static const QuadratureRule r3 = simplex_rule(3, 3);
  if (dim == 2) return r2;
  if (dim == 3) return r3;
  throw UsageError("cell_rule: dimension must be 2 or 3");
}

const QuadratureRule& facet_rule(int dim) {
  static const QuadratureRule r1 = simplex_rule(1, 2);
  static const QuadratureRule r2 = simplex_rule(2, 2);
  if (dim == 2) return r1;
  if (dim == 3) return r2;
  throw UsageError("facet_rule: dimension must be 2 or 3");
}

}  // namespace mhdfem
