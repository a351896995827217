#pragma once

#include "mhdfem/fem.hpp"
#include "mhdfem/forms.hpp"
#include "mhdfem/physics.hpp"

namespace mhdfem {

/// Discrete unknowns at one time level. `b` is the RT0 fluctuation; the total field
/// is b + Physics::background. `s` is only set for the entropy variant.
struct State {
  double t = 0.0;
  FeFunction u;
  FeFunction rho;
  FeFunction b;
  FeFunction s;
};

/// Checks spaces against the discretization and that every cell density is positive.
void validate_state(const State& state, const DiscreteSpaces& spaces, const Physics& physics);

/// Total field B0 + b as a piecewise field (b must outlive the result).
[[nodiscard]] PiecewiseField total_field(const FeFunction& b, const Vec3& background);

}  // namespace mhdfem
