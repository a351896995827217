#pragma once

#include <vector>

#include "mhdfem/common.hpp"

namespace mhdfem {

/// Quadrature rule on the reference simplex of dimension 1, 2 or 3.
///
/// Points are barycentric; weights sum to one, so an integral over a simplex K
/// is |K| * sum_q weights[q] * f(points[q]).
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<Bary> points;
  std::vector<double> weights;

  [[nodiscard]] int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Jacobi nodes/weights on [0,1] for the weight (1-x)^alpha.
void gauss_jacobi(int n, double alpha, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed-coordinate (conical product) rule with n points per direction.
/// Exact for polynomials of total degree 2n-1.
[[nodiscard]] QuadratureRule simplex_rule(int dim, int points_per_direction);

/// Default cell rule (degree 5) and facet rule (degree 3).
[[nodiscard]] const QuadratureRule& cell_rule(int dim);
[[nodiscard]] const QuadratureRule& facet_rule(int dim);

}  // namespace mhdfem
