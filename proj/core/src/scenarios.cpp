#include "mhdfem/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mhdfem {

namespace {

constexpr double kRtWidth = 0.02;

int coarsen(int base, int factor) {
  if (factor < 1) throw ConfigError("resolution factor must be >= 1");
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(base) / factor)));
}

}  // namespace

SimConfig scenario_invariants3d(int factor) {
  SimConfig cfg;
  const int n = coarsen(4, factor);
  cfg.mesh.dim = 3;
  cfg.mesh.divisions = {n, n, n};
  cfg.mesh.lower = Vec3(-1.0, -1.0, -1.0);
  cfg.mesh.upper = Vec3(1.0, 1.0, 1.0);
  cfg.physics.variant = Variant::BarotropicInviscid;
  cfg.physics.eos = EquationOfState{EosKind::Polytropic, 1.0, 5.0 / 3.0, 1.0};
  cfg.time.dt = 0.005;
  cfg.time.t_end = 1.0;
  cfg.output.directory = "output/invariants3d";
  cfg.initial.kind = "invariants3d";
  return cfg;
}

SimConfig scenario_rayleigh_taylor(double b0, int factor) {
  if (!(b0 >= 0.0)) throw ConfigError("background field strength must be >= 0");
  SimConfig cfg;
  cfg.mesh.dim = 2;
  cfg.mesh.divisions = {coarsen(32, factor), coarsen(128, factor), 1};
  cfg.mesh.lower = Vec3::Zero();
  cfg.mesh.upper = Vec3(0.25, 1.0, 0.0);
  Physics& ph = cfg.physics;
  ph.variant = Variant::FullEntropy;
  ph.mu = ph.lambda = ph.nu = 0.01;
  ph.eos = EquationOfState{EosKind::IdealGas, 1.0, 5.0 / 3.0, 1.0};
  ph.background = Vec3(b0, 0.0, 0.0);
  ph.potential_gradient = Vec3(0.0, -1.0, 0.0);
  cfg.time.dt = 0.005;
  cfg.time.t_end = 5.0;
  cfg.output.directory = "output/rayleigh_taylor";
  cfg.initial.kind = "rayleigh_taylor";
  return cfg;
}

double rt_pressure(double y) { return 1.5 * y + 1.25 + (0.25 - 0.5 * y) * std::tanh((y - 0.5) / kRtWidth); }

double rt_density(double y) { return 1.5 - 0.5 * std::tanh((y - 0.5) / kRtWidth); }

Vec3 rt_velocity(const Vec3& x, const EquationOfState& eos) {
  const double c = std::sqrt(eos.gamma * rt_pressure(x.y()) / rt_density(x.y()));
  const double d = x.y() - 0.5;
  return {0.0, -0.025 * c * std::cos(8.0 * kPi * x.x()) * std::exp(-d * d / 0.09), 0.0};
}

double rt_entropy(double y, const EquationOfState& eos) {
  const double rho = rt_density(y);
  return eos.cv * rho * std::log(rt_pressure(y) / ((eos.gamma - 1.0) * eos.K * std::pow(rho, eos.gamma)));
}

Vec3 invariants3d_velocity(const Vec3& x) {
  const double sx = std::sin(kPi * x.x()), cx = std::cos(kPi * x.x());
  const double sy = std::sin(kPi * x.y()), cy = std::cos(kPi * x.y());
  const double sz = std::sin(kPi * x.z()), cz = std::cos(kPi * x.z());
  return {sx * cy * cz, cx * sy * cz, cx * cy * sz};
}

double invariants3d_density(const Vec3& x) {
  return 2.0 + std::sin(kPi * x.x()) * std::sin(kPi * x.y()) * std::sin(kPi * x.z());
}

Vec3 invariants3d_potential(const Vec3& x) {
  const double bump = (1.0 - x.x() * x.x()) * (1.0 - x.y() * x.y()) * (1.0 - x.z() * x.z());
  return 0.5 * bump * Vec3(std::sin(kPi * x.x()), std::sin(kPi * x.y()), std::sin(kPi * x.z()));
}

State initial_state(const SimConfig& cfg, const DiscreteSpaces& spaces) {
  const Physics& ph = cfg.physics;
  State st;
  st.t = 0.0;
  const std::string& kind = cfg.initial.kind;
  if (kind == "invariants3d") {
    st.u = l2_project(spaces.velocity, VectorField(invariants3d_velocity));
    st.rho = l2_project(spaces.density, ScalarField(invariants3d_density));
    const FeFunction a = l2_project(spaces.curl_vec, VectorField(invariants3d_potential));
    st.b = exact_curl(a, spaces.field);
  } else if (kind == "rayleigh_taylor") {
    const EquationOfState eos = ph.eos;
    st.u = l2_project(spaces.velocity, VectorField([eos](const Vec3& x) { return rt_velocity(x, eos); }));
    st.rho = l2_project(spaces.density, ScalarField([](const Vec3& x) { return rt_density(x.y()); }));
    st.s = l2_project(spaces.density, ScalarField([eos](const Vec3& x) { return rt_entropy(x.y(), eos); }));
    st.b = FeFunction(spaces.field);
  } else if (kind == "rest") {
    st.u = FeFunction(spaces.velocity);
    st.rho = FeFunction(spaces.density, Vector::Constant(spaces.density->dof_count(), cfg.initial.density));
    st.b = FeFunction(spaces.field);
    if (ph.has_entropy()) st.s = FeFunction(spaces.density);
  } else {
    throw ConfigError("unknown initial kind '" + kind + "'");
  }
  validate_state(st, spaces, ph);
  return st;
}

Problem make_problem(const SimConfig& cfg) {
  (void)cfg.validate();
  Problem p;
  p.mesh = std::make_shared<const Mesh>(build_mesh(cfg.mesh));
  p.spaces = DiscreteSpaces::make(p.mesh, cfg.physics.div_velocity());
  p.state = initial_state(cfg, p.spaces);
  return p;
}

double interface_amplitude(const FeFunction& rho) {
  if (rho.space().family() != Family::Dg0) throw UsageError("interface_amplitude expects a DG0 density");
  const Mesh& m = rho.space().mesh();
  const double tol = 1e-9 * (m.box().upper.y() - m.box().lower.y());
  auto key = [&](int c) { return static_cast<long long>(std::llround(m.centroid(c).y() / tol)); };
  std::map<long long, std::pair<double, double>> rows;  // mass, volume
  for (int c = 0; c < m.num_cells(); ++c) {
    auto& r = rows[key(c)];
    r.first += rho.coeffs()[c] * m.volume(c);
    r.second += m.volume(c);
  }
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto& r = rows[key(c)];
    const double d = rho.coeffs()[c] - r.first / r.second;
    s += d * d * m.volume(c);
  }
  return std::sqrt(s);
}

}  // namespace mhdfem
