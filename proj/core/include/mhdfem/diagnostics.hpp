#pragma once

#include <memory>

#include "mhdfem/fem.hpp"
#include "mhdfem/forms.hpp"
#include "mhdfem/physics.hpp"
#include "mhdfem/sparse.hpp"
#include "mhdfem/state.hpp"

namespace mhdfem {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double cross_helicity = 0.0;
  double magnetic_helicity = 0.0;  // NaN in 2D
  double div_b_l2 = 0.0;
  double energy_residual = 0.0;    // 0 for the initial record
  int newton_iters = 0;
};

struct EnergyParts {
  double kinetic = 0.0;
  double magnetic = 0.0;
  double internal = 0.0;
  double potential = 0.0;
  [[nodiscard]] double total() const { return kinetic + magnetic + internal + potential; }
};

/// Energy split into its four integrals; the magnetic part uses the total field.
[[nodiscard]] EnergyParts energy_parts(const State& state, const Physics& physics);
[[nodiscard]] double total_energy(const State& state, const Physics& physics);

[[nodiscard]] double total_mass(const FeFunction& rho);
[[nodiscard]] double cross_helicity(const FeFunction& u, const FeFunction& b, const Vec3& background);
[[nodiscard]] double div_b_l2(const FeFunction& b);

/// (E' - E)/dt - d(u_mid, u_mid) - e_h(b_mid, b_mid).
[[nodiscard]] double energy_identity_residual(const State& old, const State& next, const Physics& physics,
                                              const DiscreteSpaces& spaces, double dt);

/// Left minus right side of the kinetic/internal telescoping identity
///   (1/dt) int [1/2 rho'|u'|^2 + eps(rho') - 1/2 rho|u|^2 - eps(rho)]
///   = <(rho'u' - rho u)/dt, (u + u')/2> - <(rho' - rho)/dt, 1/2 u.u' - delta(rho, rho')>.
[[nodiscard]] double telescoping_residual(const FeFunction& rho0, const FeFunction& rho1, const FeFunction& u0,
                                          const FeFunction& u1, const EquationOfState& eos, double dt);

/// Vector potentials of divergence-free RT0 fields on a 3D mesh.
///
/// Solves curl^T M curl A + M G q = curl^T M B, (M G)^T A = 0 for A in NED0 and q in
/// CG1_SCALAR_0; the factorization is computed once per mesh.
class VectorPotentialSolver {
 public:
  VectorPotentialSolver(SpacePtr ned, SpacePtr rt);
  ~VectorPotentialSolver();

  [[nodiscard]] FeFunction solve(const FeFunction& b) const;
  [[nodiscard]] double helicity(const FeFunction& b) const;
  [[nodiscard]] const SpacePtr& ned() const { return ned_; }

 private:
  SpacePtr ned_;
  SpacePtr rt_;
  SpacePtr scalar_;
  SparseMatrix curl_;
  std::unique_ptr<SparseLu> lu_;
};

/// One-shot convenience wrappers (2D raises UnsupportedDimension).
[[nodiscard]] FeFunction vector_potential(const FeFunction& b);
[[nodiscard]] double magnetic_helicity(const FeFunction& b);

/// Computes records for a run; caches the vector-potential factorization.
class DiagnosticsEngine {
 public:
  DiagnosticsEngine(const DiscreteSpaces& spaces, const Physics& physics);

  /// Magnetic helicity is NaN when `helicity` is false or in 2D.
  [[nodiscard]] DiagnosticsRecord record(const State& state, bool helicity = true) const;
  [[nodiscard]] DiagnosticsRecord record(const State& old, const State& next, double dt, int newton_iters,
                                         bool helicity = true) const;

 private:
  DiscreteSpaces spaces_;
  Physics physics_;
  std::unique_ptr<VectorPotentialSolver> potential_;
};

}  // namespace mhdfem
