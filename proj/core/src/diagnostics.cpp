#include "mhdfem/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mhdfem/quadrature.hpp"

namespace mhdfem {

EnergyParts energy_parts(const State& state, const Physics& physics) {
  const Mesh& m = state.rho.space().mesh();
  const QuadratureRule& q = cell_rule(m.dim());
  const Vector& rho = state.rho.coeffs();
  const bool ent = physics.has_entropy();
  EnergyParts e;
  BasisEval bu;
  BasisEval bb;
  for (int c = 0; c < m.num_cells(); ++c) {
    const double vol = m.volume(c);
    double uu = 0.0;
    double bsq = 0.0;
    double phi = 0.0;
    for (int p = 0; p < q.size(); ++p) {
      state.u.space().eval(c, q.points[p], bu);
      state.b.space().eval(c, q.points[p], bb);
      const Vec3 u = combine_value(state.u.space(), c, bu, state.u.coeffs());
      const Vec3 b = combine_value(state.b.space(), c, bb, state.b.coeffs()) + physics.background;
      uu += q.weights[p] * u.squaredNorm();
      bsq += q.weights[p] * b.squaredNorm();
      phi += q.weights[p] * physics.potential(m.point(c, q.points[p]));
    }
    e.kinetic += 0.5 * rho[c] * uu * vol;
    e.magnetic += 0.5 * bsq * vol;
    e.internal += physics.eos.energy(rho[c], ent ? state.s.coeffs()[c] : 0.0) * vol;
    e.potential += rho[c] * phi * vol;
  }
  return e;
}

double total_energy(const State& state, const Physics& physics) { return energy_parts(state, physics).total(); }

double total_mass(const FeFunction& rho) {
  if (rho.space().family() != Family::Dg0) throw UsageError("total_mass expects a DG0 density");
  const Mesh& m = rho.space().mesh();
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) s += rho.coeffs()[c] * m.volume(c);
  return s;
}

double cross_helicity(const FeFunction& u, const FeFunction& b, const Vec3& background) {
  return inner(u.space().mesh(), piecewise(u), total_field(b, background));
}

double div_b_l2(const FeFunction& b) {
  const Vector div = cell_divergence(b);
  const Mesh& m = b.space().mesh();
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) s += div[c] * div[c] * m.volume(c);
  return std::sqrt(s);
}

double energy_identity_residual(const State& old, const State& next, const Physics& physics,
                                const DiscreteSpaces& spaces, double dt) {
  const double e0 = total_energy(old, physics);
  const double e1 = total_energy(next, physics);
  const FeFunction um(old.u.space_ptr(), 0.5 * (old.u.coeffs() + next.u.coeffs()));
  const FeFunction bm(old.b.space_ptr(), 0.5 * (old.b.coeffs() + next.b.coeffs()));
  const double d = um.space().family() == Family::Cg1Vector ? form_d(um, um, physics.mu, physics.lambda) : 0.0;
  const double eh = form_eh(bm, bm, physics.nu, spaces.curl_out);
  return (e1 - e0) / dt - d - eh;
}

double telescoping_residual(const FeFunction& rho0, const FeFunction& rho1, const FeFunction& u0,
                            const FeFunction& u1, const EquationOfState& eos, double dt) {
  const Mesh& m = rho0.space().mesh();
  const QuadratureRule& q = cell_rule(m.dim());
  double lhs = 0.0;
  double rhs = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const double r0 = rho0.coeffs()[c];
    const double r1 = rho1.coeffs()[c];
    const double vol = m.volume(c);
    double k0 = 0.0, k1 = 0.0, cross = 0.0, mom = 0.0;
    for (int p = 0; p < q.size(); ++p) {
      const Vec3 a = u0.evaluate(c, q.points[p]);
      const Vec3 b = u1.evaluate(c, q.points[p]);
      const double w = q.weights[p] * vol;
      k0 += w * a.squaredNorm();
      k1 += w * b.squaredNorm();
      cross += w * a.dot(b);
      mom += w * (r1 * b - r0 * a).dot(0.5 * (a + b));
    }
    lhs += 0.5 * r1 * k1 + eos.energy(r1) * vol - 0.5 * r0 * k0 - eos.energy(r0) * vol;
    rhs += mom - (r1 - r0) * (0.5 * cross - delta_quotient(r0, r1, eos) * vol);
  }
  return (lhs - rhs) / dt;
}

VectorPotentialSolver::VectorPotentialSolver(SpacePtr ned, SpacePtr rt) : ned_(std::move(ned)), rt_(std::move(rt)) {
  if (ned_->mesh().dim() != 3)
    throw UnsupportedDimension("magnetic helicity is trivially conserved in 2D; no vector potential is formed");
  if (ned_->family() != Family::Ned0 || rt_->family() != Family::Rt0)
    throw UsageError("VectorPotentialSolver maps RT0 fields to NED0 potentials");
  scalar_ = make_space(ned_->mesh_ptr(), Family::Cg1Scalar0);
  curl_ = curl_matrix(*ned_, *rt_);
  const SparseMatrix k11 = SparseMatrix(curl_.transpose()) * rt_->mass() * curl_;
  const SparseMatrix k12 = ned_->mass() * gradient_matrix(*scalar_, *ned_);
  const int nn = ned_->dof_count();
  const int ns = scalar_->dof_count();
  std::vector<Triplet> trip;
  for (int j = 0; j < k11.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(k11, j); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  for (int j = 0; j < k12.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(k12, j); it; ++it) {
      trip.emplace_back(it.row(), nn + it.col(), it.value());
      trip.emplace_back(nn + it.col(), it.row(), it.value());
    }
  SparseMatrix k(nn + ns, nn + ns);
  k.setFromTriplets(trip.begin(), trip.end());
  k.makeCompressed();
  lu_ = std::make_unique<SparseLu>();
  lu_->compute(k);
}

VectorPotentialSolver::~VectorPotentialSolver() = default;

FeFunction VectorPotentialSolver::solve(const FeFunction& b) const {
  if (b.space_ptr() != rt_ && &b.space().mesh() != &rt_->mesh())
    throw UsageError("field and potential spaces live on different meshes");
  const double div = div_b_l2(b);
  const double scale = 1.0 + std::sqrt(std::max(0.0, inner(b, b)));
  if (div > 1e-9 * scale)
    throw StateError("vector potential requires a divergence-free field (||div B|| = " + std::to_string(div) + ")");
  const int nn = ned_->dof_count();
  Vector rhs = Vector::Zero(nn + scalar_->dof_count());
  rhs.head(nn) = curl_.transpose() * (rt_->mass() * b.coeffs());
  const Vector x = lu_->solve(rhs);
  return FeFunction(ned_, x.head(nn));
}

double VectorPotentialSolver::helicity(const FeFunction& b) const { return inner(solve(b), b); }

FeFunction vector_potential(const FeFunction& b) {
  const VectorPotentialSolver solver(make_space(b.space().mesh_ptr(), Family::Ned0), b.space_ptr());
  return solver.solve(b);
}

double magnetic_helicity(const FeFunction& b) {
  const FeFunction a = vector_potential(b);
  return inner(a, b);
}

DiagnosticsEngine::DiagnosticsEngine(const DiscreteSpaces& spaces, const Physics& physics)
    : spaces_(spaces), physics_(physics) {
  if (spaces_.mesh->dim() == 3) potential_ = std::make_unique<VectorPotentialSolver>(spaces_.curl_vec, spaces_.field);
}

DiagnosticsRecord DiagnosticsEngine::record(const State& state, bool helicity) const {
  DiagnosticsRecord r;
  r.t = state.t;
  r.mass = total_mass(state.rho);
  r.energy = total_energy(state, physics_);
  r.cross_helicity = cross_helicity(state.u, state.b, physics_.background);
  r.magnetic_helicity = potential_ && helicity ? potential_->helicity(state.b) : std::numeric_limits<double>::quiet_NaN();
  r.div_b_l2 = div_b_l2(state.b);
  return r;
}

DiagnosticsRecord DiagnosticsEngine::record(const State& old, const State& next, double dt, int newton_iters,
                                            bool helicity) const {
  DiagnosticsRecord r = record(next, helicity);
  r.energy_residual = energy_identity_residual(old, next, physics_, spaces_, dt);
  r.newton_iters = newton_iters;
  return r;
}

}  // namespace mhdfem
