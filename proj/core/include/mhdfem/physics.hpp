#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mhdfem/common.hpp"
#include "mhdfem/eos.hpp"
#include "mhdfem/forms.hpp"

namespace mhdfem {

enum class Variant { BarotropicViscous, BarotropicInviscid, FullEntropy };

[[nodiscard]] std::string_view variant_name(Variant v);
[[nodiscard]] Variant parse_variant(std::string_view name);

/// Material and model parameters of one simulation.
struct Physics {
  Variant variant = Variant::BarotropicInviscid;
  double mu = 0.0;
  double lambda = 0.0;
  double nu = 0.0;
  EquationOfState eos;
  Vec3 background = Vec3::Zero();  // constant field B0 added to the RT0 fluctuation
  // Affine gravitational potential phi(x) = potential_gradient . x + potential_offset.
  Vec3 potential_gradient = Vec3::Zero();
  double potential_offset = 0.0;
  UpwindSettings upwind;

  [[nodiscard]] bool has_entropy() const { return variant == Variant::FullEntropy; }

  /// Velocity lives in RT0 for the inviscid scheme (and for the entropy scheme without
  /// viscosity), in CG1 otherwise.
  [[nodiscard]] bool div_velocity() const;

  [[nodiscard]] double potential(const Vec3& x) const { return potential_gradient.dot(x) + potential_offset; }

  /// Throws ConfigError on inconsistent parameters; returns non-fatal warnings.
  std::vector<std::string> validate() const;
};

}  // namespace mhdfem
