#include "mhdfem/eos.hpp"

#include <cmath>
#include <string>

namespace mhdfem {

namespace {

void require_positive(double rho) {
  if (!(rho > 0.0)) throw StateError("nonpositive density " + std::to_string(rho));
}

// expm1(z) / z, continuous at 0.
double expm1_ratio(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
  return std::expm1(z) / z;
}

// log1p(h) / h, continuous at 0.
double log1p_ratio(double h) {
  if (std::abs(h) < 1e-5) return 1.0 - h * (0.5 - h * (1.0 / 3.0 - h * 0.25));
  return std::log1p(h) / h;
}

}  // namespace

double EquationOfState::energy(double rho, double s) const {
  require_positive(rho);
  const double base = K * std::pow(rho, gamma);
  return kind == EosKind::Polytropic ? base : base * std::exp(s / (cv * rho));
}

double EquationOfState::d_rho(double rho, double s) const {
  const double e = energy(rho, s);
  if (kind == EosKind::Polytropic) return gamma * e / rho;
  return e * (gamma / rho - s / (cv * rho * rho));
}

double EquationOfState::d_s(double rho, double s) const {
  if (kind == EosKind::Polytropic) return 0.0;
  return energy(rho, s) / (cv * rho);
}

void EquationOfState::validate() const {
  if (!(K > 0.0)) throw ConfigError("eos K must be > 0");
  if (!(gamma > 1.0)) throw ConfigError("eos gamma must be > 1");
  if (kind == EosKind::IdealGas && !(cv > 0.0)) throw ConfigError("eos C_v must be > 0");
}

double delta_quotient(double x, double y, const EquationOfState& eos) {
  EquationOfState baro = eos;
  baro.kind = EosKind::Polytropic;
  return delta1(x, y, 0.0, baro);
}

double delta1(double rho, double rho2, double s, const EquationOfState& eos) {
  require_positive(rho);
  require_positive(rho2);
  const double h = (rho2 - rho) / rho;
  const double lq = log1p_ratio(h);
  // d(log eps) / d(rho) secant.
  double slope = eos.gamma * lq / rho;
  if (eos.kind == EosKind::IdealGas) slope -= s / (eos.cv * rho * rho2);
  const double dlog = slope * (rho2 - rho);
  return eos.energy(rho, s) * expm1_ratio(dlog) * slope;
}

double delta2(double s, double s2, double rho, const EquationOfState& eos) {
  require_positive(rho);
  if (eos.kind == EosKind::Polytropic) return 0.0;
  const double rate = 1.0 / (eos.cv * rho);
  return eos.energy(rho, s) * rate * expm1_ratio((s2 - s) * rate);
}

}  // namespace mhdfem
