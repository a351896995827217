#include "mhdfem/state.hpp"

#include <string>

namespace mhdfem {

void validate_state(const State& state, const DiscreteSpaces& spaces, const Physics& physics) {
  auto check = [](const FeFunction& f, const SpacePtr& space, const char* name) {
    if (!f.valid()) throw UsageError(std::string("state field ") + name + " is not set");
    if (f.space_ptr() != space) throw UsageError(std::string("state field ") + name + " lives in the wrong space");
  };
  check(state.u, spaces.velocity, "u");
  check(state.rho, spaces.density, "rho");
  check(state.b, spaces.field, "b");
  if (physics.has_entropy()) check(state.s, spaces.density, "s");
  const Vector& rho = state.rho.coeffs();
  for (int c = 0; c < rho.size(); ++c)
    if (!(rho[c] > 0.0)) throw StateError("nonpositive density " + std::to_string(rho[c]) + " in cell " + std::to_string(c));
}

PiecewiseField total_field(const FeFunction& b, const Vec3& background) {
  return [&b, background](int c, const Bary& lam) { return Vec3(b.evaluate(c, lam) + background); };
}

}  // namespace mhdfem
