#include "mhdfem/physics.hpp"

#include <cmath>

namespace mhdfem {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::BarotropicViscous: return "BAROTROPIC_VISCOUS";
    case Variant::BarotropicInviscid: return "BAROTROPIC_INVISCID";
    case Variant::FullEntropy: return "FULL_ENTROPY";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::BarotropicViscous, Variant::BarotropicInviscid, Variant::FullEntropy})
    if (name == variant_name(v)) return v;
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

bool Physics::div_velocity() const {
  if (variant == Variant::BarotropicInviscid) return true;
  if (variant == Variant::FullEntropy) return mu == 0.0 && lambda == 0.0;
  return false;
}

std::vector<std::string> Physics::validate() const {
  std::vector<std::string> warnings;
  eos.validate();
  if (!std::isfinite(mu) || !std::isfinite(lambda) || !std::isfinite(nu))
    throw ConfigError("viscosity coefficients must be finite");
  if (nu < 0.0) throw ConfigError("resistivity nu must be >= 0");
  if (mu < 0.0) throw ConfigError("viscosity mu must be >= 0");
  if (variant == Variant::BarotropicInviscid && (mu != 0.0 || lambda != 0.0))
    throw ConfigError("BAROTROPIC_INVISCID requires mu = lambda = 0");
  if (variant == Variant::BarotropicViscous && mu == 0.0 && lambda == 0.0)
    warnings.emplace_back("BAROTROPIC_VISCOUS with mu = lambda = 0 keeps the no-slip velocity space");
  if (mu > 0.0 && 2.0 * mu + 3.0 * lambda < 0.0)
    warnings.emplace_back("2 mu + 3 lambda < 0: viscous dissipation is not guaranteed to be nonpositive");
  if (mu == 0.0 && lambda != 0.0)
    warnings.emplace_back("lambda != 0 with mu = 0 is outside the admissible range");
  if (variant != Variant::FullEntropy && eos.kind != EosKind::Polytropic)
    throw ConfigError("barotropic variants need a POLYTROPIC equation of state");
  if (variant == Variant::FullEntropy && eos.kind != EosKind::IdealGas)
    throw ConfigError("FULL_ENTROPY needs an IDEAL_GAS equation of state");
  if (!background.allFinite() || !potential_gradient.allFinite() || !std::isfinite(potential_offset))
    throw ConfigError("background field and potential must be finite");
  if (variant != Variant::FullEntropy && (potential_gradient != Vec3::Zero() || potential_offset != 0.0))
    throw ConfigError("a gravitational potential needs the FULL_ENTROPY variant");
  if (!(upwind.scale > 0.0)) throw ConfigError("upwind scale must be > 0");
  return warnings;
}

}  // namespace mhdfem
