#include "mhdfem/stepper.hpp"

#include <cmath>
#include <string>

#include "mhdfem/diagnostics.hpp"

namespace mhdfem {

Stepper::Stepper(DiscreteSpaces spaces, Physics physics, NewtonSettings newton)
    : system_(std::move(spaces), std::move(physics)), newton_(newton) {
  newton_.validate();
}

StepReport Stepper::advance(const State& state, double dt) {
  system_.set_previous(state, dt);
  const ResidualFn residual = [this](const Vector& x, Vector& r) { return system_.residual(x, r); };
  const JacobianFn jacobian = [this](const Vector& x, const Vector&) {
    return system_.jacobian(x, newton_.fd_scale);
  };
  const NewtonResult res = newton_solve(residual, jacobian, system_.initial_guess(), newton_, &lu_);
  StepReport report{system_.extract(res.x), res.iterations, res.final_residual, 1};

  if (debug_tol_ > 0.0) {
    const Physics& ph = system_.physics();
    if (!ph.has_entropy()) {
      const double tel = telescoping_residual(state.rho, report.state.rho, state.u, report.state.u, ph.eos, dt);
      if (std::abs(tel) > debug_tol_)
        throw SolverError("telescoping identity violated by " + std::to_string(tel));
    }
    const double en = energy_identity_residual(state, report.state, ph, system_.spaces(), dt);
    if (std::abs(en) > debug_tol_) throw SolverError("energy balance violated by " + std::to_string(en));
  }
  return report;
}

StepReport Stepper::step(const State& state, double dt) {
  try {
    return advance(state, dt);
  } catch (const SolverError&) {
    StepReport first = advance(state, 0.5 * dt);
    StepReport second = advance(first.state, 0.5 * dt);
    second.newton_iterations += first.newton_iterations;
    second.substeps = 2;
    return second;
  }
}

namespace {

Vector primary_residual(StepSystem& system, const State& old, const State& guess, double dt) {
  system.set_previous(old, dt);
  const Vector x = system.pack(guess);
  Vector r(x.size());
  if (!system.residual(x, r)) throw StateError("guess has a nonpositive density");
  return r.head(system.layout().J);
}

}  // namespace

Vector residual_barotropic(StepSystem& system, const State& old, const State& guess, double dt) {
  if (system.physics().has_entropy()) throw UsageError("residual_barotropic on an entropy discretization");
  return primary_residual(system, old, guess, dt);
}

Vector residual_full(StepSystem& system, const State& old, const State& guess, double dt) {
  if (!system.physics().has_entropy()) throw UsageError("residual_full needs the FULL_ENTROPY variant");
  return primary_residual(system, old, guess, dt);
}

}  // namespace mhdfem
