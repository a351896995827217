#pragma once

#include "mhdfem/common.hpp"

namespace mhdfem {

enum class EosKind {
  Polytropic,  // eps(rho) = K rho^gamma
  IdealGas,    // eps(rho, s) = K exp(s / (C_v rho)) rho^gamma
};

struct EquationOfState {
  EosKind kind = EosKind::Polytropic;
  double K = 1.0;
  double gamma = 5.0 / 3.0;
  double cv = 1.0;

  /// Internal energy density. `s` is ignored for polytropic gases.
  [[nodiscard]] double energy(double rho, double s = 0.0) const;
  [[nodiscard]] double d_rho(double rho, double s = 0.0) const;
  [[nodiscard]] double d_s(double rho, double s) const;

  void validate() const;
};

/// (eps(y) - eps(x)) / (y - x) for a barotropic law (entropy fixed at zero).
///
/// Evaluated through expm1/log1p so that no cancellation occurs as y -> x; at
/// y == x it returns eps'(x) and inside the coincidence band it agrees with
/// eps'((x+y)/2) to O(|y-x|^2).
[[nodiscard]] double delta_quotient(double x, double y, const EquationOfState& eos);

/// (eps(rho2, s) - eps(rho, s)) / (rho2 - rho).
[[nodiscard]] double delta1(double rho, double rho2, double s, const EquationOfState& eos);

/// (eps(rho, s2) - eps(rho, s)) / (s2 - s).
[[nodiscard]] double delta2(double s, double s2, double rho, const EquationOfState& eos);

}  // namespace mhdfem
