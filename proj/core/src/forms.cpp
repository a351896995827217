#include "mhdfem/forms.hpp"

#include <cmath>

#include "mhdfem/quadrature.hpp"

namespace mhdfem {

DiscreteSpaces DiscreteSpaces::make(std::shared_ptr<const Mesh> mesh, bool inviscid) {
  DiscreteSpaces s;
  s.mesh = mesh;
  s.field = make_space(mesh, Family::Rt0);
  s.velocity = inviscid ? s.field : make_space(mesh, Family::Cg1Vector);
  s.density = make_space(mesh, Family::Dg0);
  s.curl_vec = make_space(mesh, Family::Ned0);
  s.curl_out = mesh->dim() == 3 ? s.curl_vec : make_space(mesh, Family::Cg1Scalar0);
  return s;
}

PiecewiseField piecewise(const FeFunction& f) {
  return [&f](int cell, const Bary& lam) { return f.evaluate(cell, lam); };
}

double upwind_factor(double un, double scale) { return std::atan(un / scale) / kPi; }

namespace {

void require_family(const FeFunction& f, Family family, const char* what) {
  if (f.space().family() != family)
    throw UsageError(std::string(what) + " expects " + std::string(family_name(family)) + ", got " +
                     std::string(family_name(f.space().family())));
}

void require_velocity(const FeFunction& f, const char* what) {
  const Family fam = f.space().family();
  if (fam != Family::Cg1Vector && fam != Family::Rt0)
    throw UsageError(std::string(what) + " expects a CG1 or RT0 velocity");
}

// Calls body(cell, lam, weight) over all cell quadrature points; weight includes |K|.
template <typename Body>
double cell_sum(const Mesh& m, Body&& body) {
  const QuadratureRule& q = cell_rule(m.dim());
  double total = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    double local = 0.0;
    for (int p = 0; p < q.size(); ++p) local += q.weights[p] * body(c, q.points[p]);
    total += local * m.volume(c);
  }
  return total;
}

// Calls body(facet, lam_plus, lam_minus) over interior facet quadrature points.
template <typename Body>
double facet_sum(const Mesh& m, Body&& body) {
  const QuadratureRule& q = facet_rule(m.dim());
  double total = 0.0;
  for (int f = 0; f < m.num_facets(); ++f) {
    const Facet& fa = m.facet(f);
    if (fa.is_boundary()) continue;
    double local = 0.0;
    for (int p = 0; p < q.size(); ++p) {
      const Bary lp = m.facet_point_in_cell(f, fa.cell_plus, q.points[p]);
      const Bary lm = m.facet_point_in_cell(f, fa.cell_minus, q.points[p]);
      local += q.weights[p] * body(fa, lp, lm);
    }
    total += local * fa.measure;
  }
  return total;
}

double normal_trace(const FeFunction& u, const Facet& fa, const Bary& lp, const Bary& lm) {
  return 0.5 * (u.evaluate(fa.cell_plus, lp) + u.evaluate(fa.cell_minus, lm)).dot(fa.normal);
}

double advection_volume(const Mesh& m, const PiecewiseField& w, const FeFunction& u, const FeFunction& v) {
  return cell_sum(m, [&](int c, const Bary& lam) {
    const Vec3 uu = u.evaluate(c, lam);
    const Vec3 vv = v.evaluate(c, lam);
    const Vec3 bracket = v.jacobian(c, lam) * uu - u.jacobian(c, lam) * vv;
    return -w(c, lam).dot(bracket);
  });
}

}  // namespace

double form_a(const PiecewiseField& w, const FeFunction& u, const FeFunction& v) {
  require_family(u, Family::Cg1Vector, "form_a");
  require_family(v, Family::Cg1Vector, "form_a");
  return advection_volume(u.space().mesh(), w, u, v);
}

double form_a(const FeFunction& w, const FeFunction& u, const FeFunction& v) {
  require_family(w, Family::Cg1Vector, "form_a");
  return form_a(piecewise(w), u, v);
}

double form_ah(const FeFunction& adv, const PiecewiseField& w, const FeFunction& u, const FeFunction& v,
               const UpwindSettings& upwind) {
  require_velocity(adv, "form_ah");
  require_velocity(u, "form_ah");
  require_velocity(v, "form_ah");
  const Mesh& m = u.space().mesh();
  const double vol = advection_volume(m, w, u, v);
  const double fac = facet_sum(m, [&](const Facet& fa, const Bary& lp, const Bary& lm) {
    const int c1 = fa.cell_plus;
    const int c2 = fa.cell_minus;
    const Vec3 w1 = w(c1, lp);
    const Vec3 w2 = w(c2, lm);
    const double alpha = upwind.enabled ? upwind_factor(normal_trace(adv, fa, lp, lm), upwind.scale) : 0.0;
    const Vec3 jump_uv = u.evaluate(c1, lp).cross(v.evaluate(c1, lp)) - u.evaluate(c2, lm).cross(v.evaluate(c2, lm));
    return fa.normal.cross(0.5 * (w1 + w2) + alpha * (w1 - w2)).dot(jump_uv);
  });
  return vol + fac;
}

double form_bh(const FeFunction& f, const FeFunction& g, const FeFunction& u) {
  require_family(f, Family::Dg0, "form_bh");
  require_family(g, Family::Dg0, "form_bh");
  require_velocity(u, "form_bh");
  const Mesh& m = f.space().mesh();
  const Vector& fc = f.coeffs();
  const Vector& gc = g.coeffs();
  return facet_sum(m, [&](const Facet& fa, const Bary& lp, const Bary& lm) {
    const int c1 = fa.cell_plus;
    const int c2 = fa.cell_minus;
    return normal_trace(u, fa, lp, lm) * (fc[c1] - fc[c2]) * 0.5 * (gc[c1] + gc[c2]);
  });
}

double form_bh_upwind(const FeFunction& adv, const FeFunction& f, const FeFunction& g, const FeFunction& v,
                      const UpwindSettings& upwind) {
  const double base = form_bh(f, g, v);
  if (!upwind.enabled) return base;
  require_velocity(adv, "form_bh_upwind");
  const Mesh& m = f.space().mesh();
  const Vector& fc = f.coeffs();
  const Vector& gc = g.coeffs();
  return base + facet_sum(m, [&](const Facet& fa, const Bary& lp, const Bary& lm) {
           const int c1 = fa.cell_plus;
           const int c2 = fa.cell_minus;
           const double beta = upwind_factor(normal_trace(adv, fa, lp, lm), upwind.scale);
           return beta * normal_trace(v, fa, lp, lm) * (fc[c1] - fc[c2]) * (gc[c1] - gc[c2]);
         });
}

double form_d(const FeFunction& u, const FeFunction& v, double mu, double lambda) {
  require_velocity(u, "form_d");
  require_velocity(v, "form_d");
  return cell_sum(u.space().mesh(), [&](int c, const Bary& lam) {
    const Mat3 gu = u.jacobian(c, lam);
    const Mat3 gv = v.jacobian(c, lam);
    return -(mu * gu.cwiseProduct(gv).sum() + (lambda + mu) * gu.trace() * gv.trace());
  });
}

double form_eh(const FeFunction& b, const FeFunction& c, double nu, SpacePtr curl_out) {
  if (nu == 0.0) return 0.0;
  return -nu * inner(weak_curl(b, curl_out), weak_curl(c, curl_out));
}

FeFunction project_piecewise(SpacePtr space, const PiecewiseField& f) {
  const Mesh& m = space->mesh();
  const QuadratureRule& q = cell_rule(m.dim());
  Vector rhs = Vector::Zero(space->dof_count());
  BasisEval be;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto dofs = space->cell_dofs(c);
    for (int p = 0; p < q.size(); ++p) {
      space->eval(c, q.points[p], be);
      const Vec3 fx = f(c, q.points[p]);
      const double w = q.weights[p] * m.volume(c);
      for (int i = 0; i < be.count; ++i)
        if (dofs[i].dof >= 0) rhs[dofs[i].dof] += w * fx.dot(be.value[i]);
    }
  }
  Vector coeffs = space->mass_solver().solve(rhs);
  return FeFunction(std::move(space), std::move(coeffs));
}

namespace {

// <J, K> = <f, curl K> for all K in the space.
FeFunction project_weak_curl(SpacePtr space, const PiecewiseField& f) {
  const Mesh& m = space->mesh();
  const QuadratureRule& q = cell_rule(m.dim());
  Vector rhs = Vector::Zero(space->dof_count());
  BasisEval be;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto dofs = space->cell_dofs(c);
    for (int p = 0; p < q.size(); ++p) {
      space->eval(c, q.points[p], be);
      const Vec3 fx = f(c, q.points[p]);
      const double w = q.weights[p] * m.volume(c);
      for (int i = 0; i < be.count; ++i)
        if (dofs[i].dof >= 0) rhs[dofs[i].dof] += w * fx.dot(curl_of(be.jacobian[i]));
    }
  }
  Vector coeffs = space->mass_solver().solve(rhs);
  return FeFunction(std::move(space), std::move(coeffs));
}

}  // namespace

AuxChain build_aux_chain(const FeFunction& b, const Vec3& background, const FeFunction& u,
                         const DiscreteSpaces& spaces) {
  require_family(b, Family::Rt0, "build_aux_chain");
  const PiecewiseField btot = [&](int c, const Bary& lam) { return Vec3(b.evaluate(c, lam) + background); };
  AuxChain aux;
  aux.J = project_weak_curl(spaces.curl_out, btot);
  aux.H = project_piecewise(spaces.curl_vec, btot);
  aux.U = project_piecewise(spaces.curl_vec, piecewise(u));
  aux.E = project_piecewise(spaces.curl_out, [&](int c, const Bary& lam) {
    return Vec3(-aux.U.evaluate(c, lam).cross(aux.H.evaluate(c, lam)));
  });
  aux.alpha = project_piecewise(spaces.curl_vec, [&](int c, const Bary& lam) {
    return Vec3(-aux.J.evaluate(c, lam).cross(aux.H.evaluate(c, lam)));
  });
  return aux;
}

double form_ch_direct(const PiecewiseField& c, const FeFunction& b, const FeFunction& v,
                      const DiscreteSpaces& spaces) {
  require_family(b, Family::Rt0, "form_ch_direct");
  const FeFunction hb = l2_project(spaces.curl_vec, b);
  const FeFunction hv = project_piecewise(spaces.curl_vec, piecewise(v));
  const FeFunction x = project_piecewise(spaces.curl_out, [&](int cell, const Bary& lam) {
    return Vec3(hb.evaluate(cell, lam).cross(hv.evaluate(cell, lam)));
  });
  return cell_sum(*spaces.mesh, [&](int cell, const Bary& lam) {
    return c(cell, lam).dot(curl_of(x.jacobian(cell, lam)));
  });
}

double inner(const Mesh& mesh, const PiecewiseField& f, const PiecewiseField& g) {
  return cell_sum(mesh, [&](int c, const Bary& lam) { return f(c, lam).dot(g(c, lam)); });
}

}  // namespace mhdfem
