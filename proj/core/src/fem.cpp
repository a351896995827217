#include "mhdfem/fem.hpp"

#include <cmath>
#include <string>

#include "mhdfem/quadrature.hpp"

namespace mhdfem {

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Cg1Vector: return "CG1_VECTOR";
    case Family::Cg1Scalar0: return "CG1_SCALAR_0";
    case Family::Dg0: return "DG0";
    case Family::Rt0: return "RT0";
    case Family::Ned0: return "NED0";
  }
  return "?";
}

bool is_scalar_family(Family family) { return family == Family::Cg1Scalar0 || family == Family::Dg0; }

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, Family family) : mesh_(std::move(mesh)), family_(family) {
  if (!mesh_) throw UsageError("FeSpace needs a mesh");
  const Mesh& m = *mesh_;
  const int d = m.dim();
  const int nc = m.num_cells();
  switch (family_) {
    case Family::Cg1Scalar0: nlocal_ = d + 1; break;
    case Family::Cg1Vector: nlocal_ = d * (d + 1); break;
    case Family::Dg0: nlocal_ = 1; break;
    case Family::Rt0: nlocal_ = d + 1; break;
    case Family::Ned0: nlocal_ = m.edges_per_cell(); break;
  }
  dofs_.resize(static_cast<std::size_t>(nc) * nlocal_);

  if (family_ == Family::Cg1Scalar0 || family_ == Family::Cg1Vector) {
    std::vector<int> vnum(m.num_vertices(), -1);
    int next = 0;
    for (int v = 0; v < m.num_vertices(); ++v)
      if (!m.vertex_on_boundary(v)) vnum[v] = next++;
    const int comps = family_ == Family::Cg1Vector ? d : 1;
    ndofs_ = next * comps;
    for (int c = 0; c < nc; ++c)
      for (int i = 0; i <= d; ++i)
        for (int k = 0; k < comps; ++k) {
          const int gv = vnum[m.cell(c)[i]];
          dofs_[c * nlocal_ + i * comps + k] = {gv < 0 ? -1 : gv * comps + k, 1.0};
        }
  } else if (family_ == Family::Dg0) {
    ndofs_ = nc;
    for (int c = 0; c < nc; ++c) dofs_[c] = {c, 1.0};
  } else if (family_ == Family::Rt0) {
    std::vector<int> fnum(m.num_facets(), -1);
    int next = 0;
    for (int f = 0; f < m.num_facets(); ++f)
      if (!m.facet(f).is_boundary()) fnum[f] = next++;
    ndofs_ = next;
    for (int c = 0; c < nc; ++c)
      for (int i = 0; i <= d; ++i)
        dofs_[c * nlocal_ + i] = {fnum[m.cell_facet(c, i)], m.facet_orientation(c, i)};
  } else {
    std::vector<int> enumb(m.num_edges(), -1);
    int next = 0;
    for (int e = 0; e < m.num_edges(); ++e)
      if (!m.edge(e).on_boundary) enumb[e] = next++;
    ndofs_ = next;
    for (int c = 0; c < nc; ++c)
      for (int k = 0; k < nlocal_; ++k) dofs_[c * nlocal_ + k] = {enumb[m.cell_edge(c, k).edge], 1.0};
  }
}

void FeSpace::eval(int cell, const Bary& lam, BasisEval& out) const {
  const Mesh& m = *mesh_;
  if (cell < 0 || cell >= m.num_cells()) throw std::out_of_range("cell index " + std::to_string(cell));
  const int d = m.dim();
  const auto& g = m.bary_gradients(cell);
  out.count = nlocal_;
  switch (family_) {
    case Family::Cg1Scalar0:
      for (int i = 0; i <= d; ++i) {
        out.value[i] = Vec3(0.0, 0.0, lam[i]);
        out.jacobian[i].setZero();
        out.jacobian[i].row(2) = g[i].transpose();
      }
      break;
    case Family::Cg1Vector:
      for (int i = 0; i <= d; ++i)
        for (int k = 0; k < d; ++k) {
          const int idx = i * d + k;
          out.value[idx] = Vec3::Zero();
          out.value[idx][k] = lam[i];
          out.jacobian[idx].setZero();
          out.jacobian[idx].row(k) = g[i].transpose();
        }
      break;
    case Family::Dg0:
      out.value[0] = Vec3(0.0, 0.0, 1.0);
      out.jacobian[0].setZero();
      break;
    case Family::Rt0: {
      const Vec3 x = m.point(cell, lam);
      const double inv = 1.0 / (d * m.volume(cell));
      const auto dofs = cell_dofs(cell);
      Mat3 id = Mat3::Zero();
      for (int k = 0; k < d; ++k) id(k, k) = 1.0;
      for (int i = 0; i <= d; ++i) {
        const double s = dofs[i].sign * inv;
        out.value[i] = s * (x - m.vertex(m.cell(cell)[i]));
        out.jacobian[i] = s * id;
      }
      break;
    }
    case Family::Ned0:
      for (int k = 0; k < nlocal_; ++k) {
        const CellEdge& ce = m.cell_edge(cell, k);
        const Vec3& ga = g[ce.local_a];
        const Vec3& gb = g[ce.local_b];
        out.value[k] = lam[ce.local_a] * gb - lam[ce.local_b] * ga;
        out.jacobian[k] = gb * ga.transpose() - ga * gb.transpose();
      }
      break;
  }
}

namespace {

SparseMatrix assemble_mass(const FeSpace& test, const FeSpace& trial) {
  const Mesh& m = test.mesh();
  const QuadratureRule& q = cell_rule(m.dim());
  std::vector<Triplet> trip;
  BasisEval bt;
  BasisEval bu;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto tdofs = test.cell_dofs(c);
    const auto udofs = trial.cell_dofs(c);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(bt.value.size(), bu.value.size());
    for (int p = 0; p < q.size(); ++p) {
      test.eval(c, q.points[p], bt);
      trial.eval(c, q.points[p], bu);
      const double w = q.weights[p] * m.volume(c);
      for (int i = 0; i < bt.count; ++i)
        for (int j = 0; j < bu.count; ++j) local(i, j) += w * bt.value[i].dot(bu.value[j]);
    }
    for (int i = 0; i < bt.count; ++i) {
      if (tdofs[i].dof < 0) continue;
      for (int j = 0; j < bu.count; ++j) {
        if (udofs[j].dof < 0) continue;
        trip.emplace_back(tdofs[i].dof, udofs[j].dof, local(i, j));
      }
    }
  }
  SparseMatrix out(test.dof_count(), trial.dof_count());
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

void require_same_mesh(const FeSpace& a, const FeSpace& b) {
  if (&a.mesh() != &b.mesh()) throw UsageError("spaces live on different meshes");
}

}  // namespace

const SparseMatrix& FeSpace::mass() const {
  std::call_once(mass_once_, [this] {
    mass_ = assemble_mass(*this, *this);
    mass_solver_ = std::make_unique<SpdSolver>(mass_);
  });
  return mass_;
}

const SpdSolver& FeSpace::mass_solver() const {
  (void)mass();
  return *mass_solver_;
}

SpacePtr make_space(std::shared_ptr<const Mesh> mesh, Family family) {
  return std::make_shared<const FeSpace>(std::move(mesh), family);
}

FeFunction::FeFunction(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw UsageError("FeFunction needs a space");
  coeffs_ = Vector::Zero(space_->dof_count());
}

FeFunction::FeFunction(SpacePtr space, Vector coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw UsageError("FeFunction needs a space");
  if (coeffs_.size() != space_->dof_count())
    throw UsageError("coefficient vector length " + std::to_string(coeffs_.size()) + " does not match " +
                     std::string(family_name(space_->family())) + " dof count " +
                     std::to_string(space_->dof_count()));
  if (!coeffs_.allFinite()) throw UsageError("non-finite finite element coefficients");
}

Vec3 combine_value(const FeSpace& space, int cell, const BasisEval& be, const Vector& coeffs) {
  Vec3 v = Vec3::Zero();
  const auto dofs = space.cell_dofs(cell);
  for (int i = 0; i < be.count; ++i)
    if (dofs[i].dof >= 0) v += coeffs[dofs[i].dof] * be.value[i];
  return v;
}

Mat3 combine_jacobian(const FeSpace& space, int cell, const BasisEval& be, const Vector& coeffs) {
  Mat3 j = Mat3::Zero();
  const auto dofs = space.cell_dofs(cell);
  for (int i = 0; i < be.count; ++i)
    if (dofs[i].dof >= 0) j += coeffs[dofs[i].dof] * be.jacobian[i];
  return j;
}

Vec3 FeFunction::evaluate(int cell, const Bary& lam) const {
  BasisEval be;
  space_->eval(cell, lam, be);
  return combine_value(*space_, cell, be, coeffs_);
}

double FeFunction::evaluate_scalar(int cell, const Bary& lam) const {
  if (!space_->is_scalar()) throw UsageError("evaluate_scalar on a vector-valued space");
  return evaluate(cell, lam).z();
}

Mat3 FeFunction::jacobian(int cell, const Bary& lam) const {
  BasisEval be;
  space_->eval(cell, lam, be);
  return combine_jacobian(*space_, cell, be, coeffs_);
}

SparseMatrix mixed_mass(const FeSpace& test, const FeSpace& trial) {
  require_same_mesh(test, trial);
  return assemble_mass(test, trial);
}

SparseMatrix curl_matrix(const FeSpace& curl_space, const FeSpace& rt) {
  require_same_mesh(curl_space, rt);
  if (rt.family() != Family::Rt0) throw UsageError("curl_matrix target must be RT0");
  const Mesh& m = rt.mesh();
  std::vector<int> rt_dof(m.num_facets(), -1);
  for (int c = 0; c < m.num_cells(); ++c)
    for (int i = 0; i <= m.dim(); ++i) rt_dof[m.cell_facet(c, i)] = rt.cell_dofs(c)[i].dof;

  std::vector<Triplet> trip;
  if (m.dim() == 3) {
    if (curl_space.family() != Family::Ned0) throw UsageError("3D curl acts on NED0");
    std::vector<int> ned_dof(m.num_edges(), -1);
    for (int c = 0; c < m.num_cells(); ++c)
      for (int k = 0; k < 6; ++k) ned_dof[m.cell_edge(c, k).edge] = curl_space.cell_dofs(c)[k].dof;
    for (int f = 0; f < m.num_facets(); ++f) {
      if (rt_dof[f] < 0) continue;
      for (const FacetEdge& fe : m.facet_edges(f))
        if (ned_dof[fe.edge] >= 0) trip.emplace_back(rt_dof[f], ned_dof[fe.edge], fe.sign);
    }
  } else {
    if (curl_space.family() != Family::Cg1Scalar0) throw UsageError("2D curl acts on CG1_SCALAR_0");
    std::vector<int> vdof(m.num_vertices(), -1);
    for (int c = 0; c < m.num_cells(); ++c)
      for (int i = 0; i < 3; ++i) vdof[m.cell(c)[i]] = curl_space.cell_dofs(c)[i].dof;
    for (int f = 0; f < m.num_facets(); ++f) {
      if (rt_dof[f] < 0) continue;
      const Facet& fa = m.facet(f);
      const int p = fa.vertices[0];
      const int q = fa.vertices[1];
      const Vec3 t(-fa.normal.y(), fa.normal.x(), 0.0);
      const double s = (m.vertex(q) - m.vertex(p)).dot(t) > 0.0 ? 1.0 : -1.0;
      if (vdof[q] >= 0) trip.emplace_back(rt_dof[f], vdof[q], s);
      if (vdof[p] >= 0) trip.emplace_back(rt_dof[f], vdof[p], -s);
    }
  }
  SparseMatrix out(rt.dof_count(), curl_space.dof_count());
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

SparseMatrix gradient_matrix(const FeSpace& scalar_space, const FeSpace& ned) {
  require_same_mesh(scalar_space, ned);
  if (scalar_space.family() != Family::Cg1Scalar0 || ned.family() != Family::Ned0)
    throw UsageError("gradient_matrix maps CG1_SCALAR_0 to NED0");
  const Mesh& m = ned.mesh();
  std::vector<int> vdof(m.num_vertices(), -1);
  std::vector<int> edof(m.num_edges(), -1);
  for (int c = 0; c < m.num_cells(); ++c) {
    for (int i = 0; i <= m.dim(); ++i) vdof[m.cell(c)[i]] = scalar_space.cell_dofs(c)[i].dof;
    for (int k = 0; k < m.edges_per_cell(); ++k) edof[m.cell_edge(c, k).edge] = ned.cell_dofs(c)[k].dof;
  }
  std::vector<Triplet> trip;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (edof[e] < 0) continue;
    const auto& v = m.edge(e).vertices;
    if (vdof[v[1]] >= 0) trip.emplace_back(edof[e], vdof[v[1]], 1.0);
    if (vdof[v[0]] >= 0) trip.emplace_back(edof[e], vdof[v[0]], -1.0);
  }
  SparseMatrix out(ned.dof_count(), scalar_space.dof_count());
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

namespace {

template <typename Integrand>
FeFunction project_with(SpacePtr space, Integrand&& integrand) {
  const Mesh& m = space->mesh();
  const QuadratureRule& q = cell_rule(m.dim());
  Vector rhs = Vector::Zero(space->dof_count());
  BasisEval be;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto dofs = space->cell_dofs(c);
    for (int p = 0; p < q.size(); ++p) {
      space->eval(c, q.points[p], be);
      const Vec3 fx = integrand(m.point(c, q.points[p]));
      if (!fx.allFinite()) throw ConfigError("non-finite field value in projection");
      const double w = q.weights[p] * m.volume(c);
      for (int i = 0; i < be.count; ++i)
        if (dofs[i].dof >= 0) rhs[dofs[i].dof] += w * fx.dot(be.value[i]);
    }
  }
  Vector coeffs = space->mass_solver().solve(rhs);
  return FeFunction(std::move(space), std::move(coeffs));
}

}  // namespace

FeFunction l2_project(SpacePtr space, const VectorField& f) {
  if (space->is_scalar()) throw UsageError("vector field projected onto a scalar space");
  return project_with(std::move(space), f);
}

FeFunction l2_project(SpacePtr space, const ScalarField& f) {
  if (!space->is_scalar()) throw UsageError("scalar field projected onto a vector space");
  return project_with(std::move(space), [&f](const Vec3& x) { return Vec3(0.0, 0.0, f(x)); });
}

FeFunction l2_project(SpacePtr space, const FeFunction& g) {
  if (space->is_scalar() != g.space().is_scalar()) throw UsageError("projection between scalar and vector spaces");
  const SparseMatrix mm = mixed_mass(*space, g.space());
  Vector coeffs = space->mass_solver().solve(mm * g.coeffs());
  return FeFunction(std::move(space), std::move(coeffs));
}

FeFunction exact_curl(const FeFunction& a, SpacePtr rt) {
  const SparseMatrix c = curl_matrix(a.space(), *rt);
  return FeFunction(std::move(rt), c * a.coeffs());
}

FeFunction weak_curl(const FeFunction& b, SpacePtr curl_space) {
  if (b.space().family() != Family::Rt0) throw UsageError("weak_curl acts on RT0");
  const SparseMatrix c = curl_matrix(*curl_space, b.space());
  const Vector rhs = c.transpose() * (b.space().mass() * b.coeffs());
  Vector coeffs = curl_space->mass_solver().solve(rhs);
  return FeFunction(std::move(curl_space), std::move(coeffs));
}

Vector cell_divergence(const FeFunction& b) {
  if (b.space().family() != Family::Rt0) throw UsageError("cell_divergence acts on RT0");
  const Mesh& m = b.space().mesh();
  Vector div = Vector::Zero(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto dofs = b.space().cell_dofs(c);
    double s = 0.0;
    for (const LocalDof& ld : dofs)
      if (ld.dof >= 0) s += ld.sign * b.coeffs()[ld.dof];
    div[c] = s / m.volume(c);
  }
  return div;
}

double inner(const FeFunction& f, const FeFunction& g) {
  require_same_mesh(f.space(), g.space());
  const Mesh& m = f.space().mesh();
  const QuadratureRule& q = cell_rule(m.dim());
  BasisEval bf;
  BasisEval bg;
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c)
    for (int p = 0; p < q.size(); ++p) {
      f.space().eval(c, q.points[p], bf);
      g.space().eval(c, q.points[p], bg);
      s += q.weights[p] * m.volume(c) *
           combine_value(f.space(), c, bf, f.coeffs()).dot(combine_value(g.space(), c, bg, g.coeffs()));
    }
  return s;
}

}  // namespace mhdfem
