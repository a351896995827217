#pragma once

#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string_view>
#include <vector>

#include "mhdfem/common.hpp"
#include "mhdfem/mesh.hpp"
#include "mhdfem/sparse.hpp"

namespace mhdfem {

/// Lowest-order element families.
///
/// Cg1Vector  continuous P1 vectors, zero on the boundary (viscous velocity)
/// Cg1Scalar0 continuous P1 scalars, zero on the boundary (2D J and E, 3D gauge multiplier)
/// Dg0        piecewise constants (density, entropy)
/// Rt0        Raviart-Thomas, zero normal trace (magnetic field, inviscid velocity)
/// Ned0       Nedelec first kind, zero tangential trace (curl-space auxiliaries)
enum class Family { Cg1Vector, Cg1Scalar0, Dg0, Rt0, Ned0 };

[[nodiscard]] std::string_view family_name(Family family);
[[nodiscard]] bool is_scalar_family(Family family);

/// Global DOF of a local basis function (-1 if eliminated by the boundary condition)
/// and the sign relating the local function to the global one.
struct LocalDof {
  int dof = -1;
  double sign = 1.0;
};

inline constexpr int kMaxLocalDofs = 12;

/// Local basis functions evaluated at one point of one cell (global signs applied).
/// Scalar families store their value in the z component so that 2D out-of-plane
/// fields (J, E) combine with in-plane vectors through ordinary cross products.
struct BasisEval {
  int count = 0;
  std::array<Vec3, kMaxLocalDofs> value;
  std::array<Mat3, kMaxLocalDofs> jacobian;  // jacobian(k, j) = d value_k / d x_j
};

/// curl of a field from its Jacobian.
[[nodiscard]] inline Vec3 curl_of(const Mat3& g) {
  return {g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1)};
}

class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, Family family);
  FeSpace(const FeSpace&) = delete;
  FeSpace& operator=(const FeSpace&) = delete;

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  [[nodiscard]] int dof_count() const { return ndofs_; }
  [[nodiscard]] int local_count() const { return nlocal_; }
  [[nodiscard]] bool is_scalar() const { return is_scalar_family(family_); }

  [[nodiscard]] std::span<const LocalDof> cell_dofs(int cell) const {
    return {dofs_.data() + static_cast<std::size_t>(cell) * nlocal_, static_cast<std::size_t>(nlocal_)};
  }

  /// Basis functions of `cell` at barycentric point `lam`.
  void eval(int cell, const Bary& lam, BasisEval& out) const;

  /// Mass matrix and its factorization, built on first use.
  [[nodiscard]] const SparseMatrix& mass() const;
  [[nodiscard]] const SpdSolver& mass_solver() const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  Family family_;
  int ndofs_ = 0;
  int nlocal_ = 0;
  std::vector<LocalDof> dofs_;

  mutable std::once_flag mass_once_;
  mutable SparseMatrix mass_;
  mutable std::unique_ptr<SpdSolver> mass_solver_;
};

using SpacePtr = std::shared_ptr<const FeSpace>;

[[nodiscard]] SpacePtr make_space(std::shared_ptr<const Mesh> mesh, Family family);

/// A coefficient vector over a finite element space.
class FeFunction {
 public:
  FeFunction() = default;
  explicit FeFunction(SpacePtr space);
  FeFunction(SpacePtr space, Vector coeffs);

  [[nodiscard]] const FeSpace& space() const { return *space_; }
  [[nodiscard]] const SpacePtr& space_ptr() const { return space_; }
  [[nodiscard]] const Vector& coeffs() const { return coeffs_; }
  [[nodiscard]] Vector& coeffs() { return coeffs_; }
  [[nodiscard]] bool valid() const { return space_ != nullptr; }

  /// Value at a barycentric point. Scalar families return (0, 0, value).
  [[nodiscard]] Vec3 evaluate(int cell, const Bary& lam) const;
  [[nodiscard]] double evaluate_scalar(int cell, const Bary& lam) const;
  [[nodiscard]] Mat3 jacobian(int cell, const Bary& lam) const;

 private:
  SpacePtr space_;
  Vector coeffs_;
};

using VectorField = std::function<Vec3(const Vec3&)>;
using ScalarField = std::function<double(const Vec3&)>;

/// Local value/jacobian of a coefficient vector at a precomputed basis evaluation.
[[nodiscard]] Vec3 combine_value(const FeSpace& space, int cell, const BasisEval& be, const Vector& coeffs);
[[nodiscard]] Mat3 combine_jacobian(const FeSpace& space, int cell, const BasisEval& be, const Vector& coeffs);

/// <trial, test> with rows indexed by test DOFs.
[[nodiscard]] SparseMatrix mixed_mass(const FeSpace& test, const FeSpace& trial);

/// Incidence matrix mapping curl-space coefficients to RT0 fluxes:
/// Ned0 -> Rt0 in 3D, Cg1Scalar0 -> Rt0 in 2D (curl psi = (d_y psi, -d_x psi)).
[[nodiscard]] SparseMatrix curl_matrix(const FeSpace& curl_space, const FeSpace& rt);

/// Incidence matrix Cg1Scalar0 -> Ned0 realising the gradient.
[[nodiscard]] SparseMatrix gradient_matrix(const FeSpace& scalar_space, const FeSpace& ned);

/// L2-orthogonal projection of a field, or of a function from another space.
[[nodiscard]] FeFunction l2_project(SpacePtr space, const VectorField& f);
[[nodiscard]] FeFunction l2_project(SpacePtr space, const ScalarField& f);
[[nodiscard]] FeFunction l2_project(SpacePtr space, const FeFunction& g);

/// Exact curl of a curl-space function into RT0.
[[nodiscard]] FeFunction exact_curl(const FeFunction& a, SpacePtr rt);

/// Weak curl: <j, k> = <B, curl k> for all k in the curl space.
[[nodiscard]] FeFunction weak_curl(const FeFunction& b, SpacePtr curl_space);

/// Elementwise (constant) divergence of an RT0 function.
[[nodiscard]] Vector cell_divergence(const FeFunction& b);

/// L2 inner product of two functions on the same mesh (quadrature exact to degree 5).
[[nodiscard]] double inner(const FeFunction& f, const FeFunction& g);

}  // namespace mhdfem
