#pragma once

#include <memory>

#include "mhdfem/config.hpp"
#include "mhdfem/forms.hpp"
#include "mhdfem/state.hpp"

namespace mhdfem {

/// Taylor-Green type flow in a magnetic field on [-1,1]^3 (inviscid, rho^{5/3}).
/// Factor 1 is 4 divisions per axis; larger factors coarsen.
[[nodiscard]] SimConfig scenario_invariants3d(int factor = 1);

/// Magnetic Rayleigh-Taylor setup on [0,1/4] x [0,1] with background field (b0, 0).
/// Factor 1 is 32 x 128 squares; factor 8 is 4 x 16.
[[nodiscard]] SimConfig scenario_rayleigh_taylor(double b0, int factor = 1);

/// Profiles of the Rayleigh-Taylor initial data.
[[nodiscard]] double rt_pressure(double y);
[[nodiscard]] double rt_density(double y);
[[nodiscard]] Vec3 rt_velocity(const Vec3& x, const EquationOfState& eos);
[[nodiscard]] double rt_entropy(double y, const EquationOfState& eos);

[[nodiscard]] Vec3 invariants3d_velocity(const Vec3& x);
[[nodiscard]] double invariants3d_density(const Vec3& x);
/// Vector potential of the initial field: (1-x^2)(1-y^2)(1-z^2) (sin pi x, sin pi y, sin pi z) / 2.
[[nodiscard]] Vec3 invariants3d_potential(const Vec3& x);

/// Mesh, spaces and initial state for a configuration.
struct Problem {
  std::shared_ptr<const Mesh> mesh;
  DiscreteSpaces spaces;
  State state;
};

[[nodiscard]] Problem make_problem(const SimConfig& cfg);

/// Initial data projected into the spaces (L2 projection; the initial field is the
/// exact curl of the projected vector potential so that it is divergence free).
[[nodiscard]] State initial_state(const SimConfig& cfg, const DiscreteSpaces& spaces);

/// L2 norm of rho minus its average over the horizontal row of cells with the same
/// centroid height (structured 2D meshes).
[[nodiscard]] double interface_amplitude(const FeFunction& rho);

}  // namespace mhdfem
