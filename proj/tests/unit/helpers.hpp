#pragma once

#include <memory>
#include <random>

#include "mhdfem/fem.hpp"
#include "mhdfem/forms.hpp"
#include "mhdfem/mesh.hpp"
#include "mhdfem/quadrature.hpp"

namespace mhdfem::testkit {

inline std::shared_ptr<const Mesh> box_mesh(int dim, int n, double lo = 0.0, double hi = 1.0) {
  const int div[3] = {n, n, n};
  Box box;
  box.lower = Vec3::Constant(lo);
  box.upper = Vec3::Constant(hi);
  if (dim == 2) box.lower.z() = box.upper.z() = 0.0;
  return std::make_shared<const Mesh>(build_structured_mesh(dim, std::span<const int>(div, dim), box));
}

class Rng {
 public:
  explicit Rng(unsigned seed = 7) : gen_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Vector vector(int n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  FeFunction function(const SpacePtr& s, double lo = -1.0, double hi = 1.0) {
    return FeFunction(s, vector(s->dof_count(), lo, hi));
  }

 private:
  std::mt19937 gen_;
};

/// Integral of a piecewise integrand with a rule of higher degree than the library's.
template <class F>
double oracle_integral(const Mesh& m, F&& f, int points = 5) {
  const QuadratureRule q = simplex_rule(m.dim(), points);
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c)
    for (int p = 0; p < q.size(); ++p) s += q.weights[p] * m.volume(c) * f(c, q.points[p]);
  return s;
}

inline FeFunction unit(const SpacePtr& s, int i) {
  Vector c = Vector::Zero(s->dof_count());
  c[i] = 1.0;
  return FeFunction(s, c);
}

}  // namespace mhdfem::testkit
