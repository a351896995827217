#pragma once

#include <memory>

#include "mhdfem/assembler.hpp"
#include "mhdfem/physics.hpp"
#include "mhdfem/sparse.hpp"
#include "mhdfem/state.hpp"

namespace mhdfem {

struct StepReport {
  State state;
  int newton_iterations = 0;
  double residual = 0.0;
  int substeps = 1;  // 2 when the step was redone as two half steps
};

/// Midpoint time integrator. Not thread-safe: one stepper per run.
class Stepper {
 public:
  Stepper(DiscreteSpaces spaces, Physics physics, NewtonSettings newton);

  /// One step; on Newton failure retries once as two steps of dt/2, then rethrows.
  [[nodiscard]] StepReport step(const State& state, double dt);

  /// One attempt without retry. Negative dt runs the scheme backwards.
  [[nodiscard]] StepReport advance(const State& state, double dt);

  [[nodiscard]] const StepSystem& system() const { return system_; }
  [[nodiscard]] const DiscreteSpaces& spaces() const { return system_.spaces(); }
  [[nodiscard]] const Physics& physics() const { return system_.physics(); }

  /// After every step, checks the kinetic/internal energy telescoping identity and the
  /// discrete energy balance; a violation above `tolerance` raises SolverError.
  void enable_debug_checks(double tolerance) { debug_tol_ = tolerance; }

 private:
  StepSystem system_;
  NewtonSettings newton_;
  SparseLu lu_;  // symbolic analysis shared by all steps
  double debug_tol_ = 0.0;
};

/// Momentum, density and magnetic residual blocks of the barotropic schemes at `guess`,
/// with the auxiliaries solved exactly at the midpoint.
[[nodiscard]] Vector residual_barotropic(StepSystem& system, const State& old, const State& guess, double dt);

/// Same for the entropy scheme (momentum, density, entropy, magnetic).
[[nodiscard]] Vector residual_full(StepSystem& system, const State& old, const State& guess, double dt);

}  // namespace mhdfem
