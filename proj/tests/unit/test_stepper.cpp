#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "mhdfem/diagnostics.hpp"
#include "mhdfem/eos.hpp"
#include "mhdfem/scenarios.hpp"
#include "mhdfem/stepper.hpp"

using namespace mhdfem;
using mhdfem::testkit::box_mesh;
using mhdfem::testkit::oracle_integral;
using mhdfem::testkit::Rng;
using mhdfem::testkit::unit;

namespace {

Physics make_physics(Variant v, double mu, double lambda) {
  Physics ph;
  ph.variant = v;
  ph.mu = mu;
  ph.lambda = lambda;
  ph.nu = 0.05;
  if (v == Variant::FullEntropy) {
    ph.eos.kind = EosKind::IdealGas;
    ph.potential_gradient = Vec3(0.3, -1.0, 0.2);
    ph.potential_offset = 0.1;
  }
  return ph;
}

struct Case {
  DiscreteSpaces sp;
  Physics ph;
  State old, next;
};

Case random_case(int dim, const Physics& ph, unsigned seed) {
  Rng rng(seed);
  Case c{DiscreteSpaces::make(box_mesh(dim, 2), ph.div_velocity()), ph, {}, {}};
  if (dim == 2) c.ph.potential_gradient.z() = 0.0;
  c.ph.background = dim == 3 ? Vec3(0.3, -0.2, 0.1) : Vec3(0.4, 0.2, 0.0);
  for (State* s : {&c.old, &c.next}) {
    s->u = rng.function(c.sp.velocity, -0.5, 0.5);
    s->rho = rng.function(c.sp.density, 0.5, 1.5);
    s->b = exact_curl(rng.function(c.sp.curl_out, -0.3, 0.3), c.sp.field);
    if (ph.has_entropy()) s->s = rng.function(c.sp.density, -0.3, 0.3);
  }
  c.next.t = 0.01;
  return c;
}

// Residual of the primary blocks rebuilt from the public forms, one test function at a time.
struct Oracle {
  Vector mom, rho, ent, mag;
};

Oracle oracle_residual(const Case& c, double dt) {
  const Mesh& m = *c.sp.mesh;
  const Physics& ph = c.ph;
  const FeFunction um(c.sp.velocity, 0.5 * (c.old.u.coeffs() + c.next.u.coeffs()));
  const FeFunction bm(c.sp.field, 0.5 * (c.old.b.coeffs() + c.next.b.coeffs()));
  const FeFunction rm(c.sp.density, 0.5 * (c.old.rho.coeffs() + c.next.rho.coeffs()));
  const AuxChain aux = build_aux_chain(bm, ph.background, um, c.sp);
  const Vector& ro = c.old.rho.coeffs();
  const Vector& rn = c.next.rho.coeffs();
  const bool ent = ph.has_entropy();
  FeFunction sm(c.sp.density), theta1(c.sp.density), theta2(c.sp.density);
  if (ent) sm.coeffs() = 0.5 * (c.old.s.coeffs() + c.next.s.coeffs());
  for (int k = 0; k < m.num_cells(); ++k) {
    const QuadratureRule q = simplex_rule(m.dim(), 5);
    double ke = 0.0, phi = 0.0;
    for (int p = 0; p < q.size(); ++p) {
      ke += q.weights[p] * 0.5 * c.old.u.evaluate(k, q.points[p]).dot(c.next.u.evaluate(k, q.points[p]));
      phi += q.weights[p] * ph.potential(m.point(k, q.points[p]));
    }
    if (ent) {
      const double so = c.old.s.coeffs()[k], sn = c.next.s.coeffs()[k];
      // Independent difference quotients straight from the energy density.
      auto d1 = [&](double s) { return (ph.eos.energy(rn[k], s) - ph.eos.energy(ro[k], s)) / (rn[k] - ro[k]); };
      auto d2 = [&](double r) { return (ph.eos.energy(r, sn) - ph.eos.energy(r, so)) / (sn - so); };
      theta1.coeffs()[k] = ke - phi - 0.5 * (d1(so) + d1(sn));
      theta2.coeffs()[k] = -0.5 * (d2(ro[k]) + d2(rn[k]));
    } else {
      theta1.coeffs()[k] =
          ke - (ph.eos.energy(rn[k]) - ph.eos.energy(ro[k])) / (rn[k] - ro[k]);
    }
  }
  const PiecewiseField w = [&](int k, const Bary& l) {
    return Vec3(0.5 * (ro[k] * c.old.u.evaluate(k, l) + rn[k] * c.next.u.evaluate(k, l)));
  };
  Oracle o;
  const int nv = c.sp.velocity->dof_count();
  o.mom.resize(nv);
  for (int i = 0; i < nv; ++i) {
    const FeFunction v = unit(c.sp.velocity, i);
    const double lin = oracle_integral(m, [&](int k, const Bary& l) {
      return (rn[k] * c.next.u.evaluate(k, l) - ro[k] * c.old.u.evaluate(k, l)).dot(v.evaluate(k, l)) / dt;
    });
    double r = lin + inner(aux.alpha, v) + form_ah(um, w, um, v, ph.upwind) - form_d(um, v, ph.mu, ph.lambda) +
               form_bh_upwind(um, theta1, rm, v, ph.upwind);
    if (ent) r += form_bh_upwind(um, theta2, sm, v, ph.upwind);
    o.mom[i] = r;
  }
  const int nc = m.num_cells();
  o.rho.resize(nc);
  o.ent.resize(ent ? nc : 0);
  for (int k = 0; k < nc; ++k) {
    const FeFunction e = unit(c.sp.density, k);
    o.rho[k] = m.volume(k) * (rn[k] - ro[k]) / dt + form_bh_upwind(um, e, rm, um, ph.upwind);
    if (ent)
      o.ent[k] = m.volume(k) * (c.next.s.coeffs()[k] - c.old.s.coeffs()[k]) / dt +
                 form_bh_upwind(um, e, sm, um, ph.upwind);
  }
  const SparseMatrix curl = curl_matrix(*c.sp.curl_out, *c.sp.field);
  o.mag = (c.next.b.coeffs() - c.old.b.coeffs()) / dt + curl * (aux.E.coeffs() + ph.nu * aux.J.coeffs());
  return o;
}

void expect_close(const Vector& a, const Vector& b, double tol, const char* what) {
  ASSERT_EQ(a.size(), b.size()) << what;
  EXPECT_LE((a - b).lpNorm<Eigen::Infinity>(), tol) << what;
}

struct VariantCase {
  Variant v;
  double mu, lambda;
};

class ResidualCrossCheck : public ::testing::TestWithParam<std::tuple<int, VariantCase, bool>> {};

TEST_P(ResidualCrossCheck, MatchesFormsOracle) {
  const auto [dim, vc, upwind] = GetParam();
  Physics ph = make_physics(vc.v, vc.mu, vc.lambda);
  ph.upwind.enabled = upwind;
  const Case c = random_case(dim, ph, 31 + dim);
  const double dt = 0.01;
  StepSystem sys(c.sp, c.ph);
  const Vector r = ph.has_entropy() ? residual_full(sys, c.old, c.next, dt) : residual_barotropic(sys, c.old, c.next, dt);
  const BlockLayout& L = sys.layout();
  const Oracle o = oracle_residual(c, dt);
  expect_close(r.segment(L.u, L.nu), o.mom, 1e-11, "momentum");
  expect_close(r.segment(L.rho, L.nrho), o.rho, 1e-11, "density");
  if (ph.has_entropy()) expect_close(r.segment(L.s, L.ns), o.ent, 1e-11, "entropy");
  expect_close(r.segment(L.b, L.nb), o.mag, 1e-11, "magnetic");
  EXPECT_GT(o.mom.norm(), 1e-3);
}

INSTANTIATE_TEST_SUITE_P(
    Variants, ResidualCrossCheck,
    ::testing::Combine(::testing::Values(2, 3),
                       ::testing::Values(VariantCase{Variant::BarotropicInviscid, 0.0, 0.0},
                                         VariantCase{Variant::BarotropicViscous, 0.2, 0.1},
                                         VariantCase{Variant::FullEntropy, 0.2, -0.1},
                                         VariantCase{Variant::FullEntropy, 0.0, 0.0}),
                       ::testing::Bool()));

TEST(Stepper, AuxiliaryRowsVanishAtPackedState) {
  const Case c = random_case(3, make_physics(Variant::BarotropicInviscid, 0, 0), 5);
  StepSystem sys(c.sp, c.ph);
  sys.set_previous(c.old, 0.01);
  const Vector x = sys.pack(c.next);
  Vector r(x.size());
  ASSERT_TRUE(sys.residual(x, r));
  EXPECT_LE(r.tail(x.size() - sys.layout().J).lpNorm<Eigen::Infinity>(), 1e-13);
}

TEST(Stepper, RejectsNonpositiveDensity) {
  const Case c = random_case(2, make_physics(Variant::BarotropicInviscid, 0, 0), 6);
  StepSystem sys(c.sp, c.ph);
  sys.set_previous(c.old, 0.01);
  Vector x = sys.initial_guess();
  x[sys.layout().rho] = -0.1;
  Vector r(x.size());
  EXPECT_FALSE(sys.residual(x, r));
}

TEST(Stepper, SteadyStateNeedsNoIterations) {
  for (Variant v : {Variant::BarotropicInviscid, Variant::BarotropicViscous}) {
    Physics ph = make_physics(v, v == Variant::BarotropicViscous ? 0.1 : 0.0, 0.0);
    ph.background = Vec3(0.2, 0.3, -0.4);
    const DiscreteSpaces sp = DiscreteSpaces::make(box_mesh(3, 2), ph.div_velocity());
    State s{0.0, FeFunction(sp.velocity), FeFunction(sp.density, Vector::Constant(sp.density->dof_count(), 1.3)),
            FeFunction(sp.field), FeFunction()};
    Stepper st(sp, ph, NewtonSettings{});
    const StepReport rep = st.step(s, 0.01);
    EXPECT_EQ(rep.newton_iterations, 0);
    EXPECT_EQ(rep.state.rho.coeffs(), s.rho.coeffs());
    EXPECT_EQ(rep.state.u.coeffs().norm(), 0.0);
    EXPECT_DOUBLE_EQ(rep.state.t, 0.01);
  }
}

TEST(Stepper, ZeroEntropyReducesToBarotropic) {
  for (int dim : {2, 3}) {
    Physics full = make_physics(Variant::FullEntropy, 0.0, 0.0);
    full.potential_gradient = Vec3::Zero();
    full.potential_offset = 0.0;
    Physics baro = make_physics(Variant::BarotropicInviscid, 0.0, 0.0);
    Case c = random_case(dim, full, 40 + dim);
    c.old.s = FeFunction(c.sp.density);
    c.next.s = FeFunction(c.sp.density);
    baro.background = c.ph.background;
    StepSystem sf(c.sp, c.ph), sb(c.sp, baro);
    State bo = c.old, bn = c.next;
    bo.s = FeFunction();
    bn.s = FeFunction();
    const Vector rf = residual_full(sf, c.old, c.next, 0.02);
    const Vector rb = residual_barotropic(sb, bo, bn, 0.02);
    const BlockLayout &F = sf.layout(), &B = sb.layout();
    expect_close(rf.segment(F.u, F.nu), rb.segment(B.u, B.nu), 1e-13, "momentum");
    expect_close(rf.segment(F.rho, F.nrho), rb.segment(B.rho, B.nrho), 1e-13, "density");
    expect_close(rf.segment(F.b, F.nb), rb.segment(B.b, B.nb), 1e-13, "magnetic");
  }
}

TEST(Stepper, JacobianMatchesGlobalDifferences) {
  for (int dim : {2, 3}) {
    const Case c = random_case(dim, make_physics(Variant::FullEntropy, 0.0, 0.0), 50 + dim);
    StepSystem sys(c.sp, c.ph);
    sys.set_previous(c.old, 0.01);
    const Vector x = sys.pack(c.next);
    Vector r0(x.size());
    ASSERT_TRUE(sys.residual(x, r0));
    const ResidualFn res = [&](const Vector& y, Vector& r) { return sys.residual(y, r); };
    const SparseMatrix ref = fd_jacobian(res, x, r0, 1e-7);
    const SparseMatrix jac = sys.jacobian(x, 1e-7);
    const Eigen::MatrixXd diff = Eigen::MatrixXd(jac) - Eigen::MatrixXd(ref);
    EXPECT_LE(diff.lpNorm<Eigen::Infinity>(), 1e-5 * (1.0 + Eigen::MatrixXd(ref).lpNorm<Eigen::Infinity>()));
  }
}

TEST(Stepper, ReversibleUnderNegativeStep) {
  for (int dim : {2, 3}) {
    Physics ph = make_physics(Variant::BarotropicInviscid, 0.0, 0.0);
    ph.nu = 0.0;
    Case c = random_case(dim, ph, 60 + dim);
    NewtonSettings ns;
    ns.abs_tol = 1e-13;
    Stepper st(c.sp, c.ph, ns);
    const StepReport fwd = st.advance(c.old, 0.02);
    const StepReport back = st.advance(fwd.state, -0.02);
    EXPECT_LE((back.state.u.coeffs() - c.old.u.coeffs()).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_LE((back.state.rho.coeffs() - c.old.rho.coeffs()).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_LE((back.state.b.coeffs() - c.old.b.coeffs()).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_NEAR(back.state.t, 0.0, 1e-15);
    EXPECT_GT((fwd.state.u.coeffs() - c.old.u.coeffs()).norm(), 1e-4);
  }
}

TEST(Stepper, OneStepOfTheInvariantProblemConserves) {
  SimConfig cfg = scenario_invariants3d(2);
  const Problem p = make_problem(cfg);
  Stepper st(p.spaces, cfg.physics, cfg.solver);
  st.enable_debug_checks(1e3 * cfg.solver.abs_tol);
  const StepReport rep = st.step(p.state, cfg.time.dt);
  EXPECT_GT(rep.newton_iterations, 0);
  EXPECT_EQ(rep.substeps, 1);
  const double m0 = total_mass(p.state.rho), m1 = total_mass(rep.state.rho);
  EXPECT_LE(std::abs(m1 - m0) / m0, 1e-12);
  EXPECT_LE(div_b_l2(rep.state.b), 1e-12);
  EXPECT_LE(std::abs(energy_identity_residual(p.state, rep.state, cfg.physics, p.spaces, cfg.time.dt)),
            100 * cfg.solver.abs_tol);
}

TEST(Stepper, ExhaustedNewtonRethrowsAfterRetry) {
  const Case c = random_case(2, make_physics(Variant::BarotropicInviscid, 0, 0), 70);
  NewtonSettings ns;
  ns.max_iter = 1;
  ns.abs_tol = 1e-14;
  ns.rel_tol = 1e-30;
  Stepper st(c.sp, c.ph, ns);
  EXPECT_THROW((void)st.step(c.old, 0.05), SolverError);
}

TEST(Stepper, RetryAsTwoHalfSteps) {
  // Large steps stall the damped Newton iteration from the previous state; pick one
  // where two half steps still converge and check that step() takes that route.
  const Case c = random_case(2, make_physics(Variant::BarotropicInviscid, 0, 0), 71);
  bool tested = false;
  for (double dt : {0.12, 0.14, 0.16, 0.18, 0.2, 0.25}) {
    Stepper probe(c.sp, c.ph, NewtonSettings{});
    try {
      (void)probe.advance(c.old, dt);
      continue;
    } catch (const SolverError&) {
    }
    Stepper fresh(c.sp, c.ph, NewtonSettings{});
    StepReport first, second;
    try {
      first = fresh.advance(c.old, 0.5 * dt);
      second = fresh.advance(first.state, 0.5 * dt);
    } catch (const SolverError&) {
      continue;
    }
    Stepper st(c.sp, c.ph, NewtonSettings{});
    const StepReport rep = st.step(c.old, dt);
    EXPECT_EQ(rep.substeps, 2);
    EXPECT_NEAR(rep.state.t, dt, 1e-15);
    EXPECT_LE((rep.state.u.coeffs() - second.state.u.coeffs()).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_EQ(rep.newton_iterations, first.newton_iterations + second.newton_iterations);
    tested = true;
    break;
  }
  EXPECT_TRUE(tested) << "no step size separated the full step from the half steps";
}

}  // namespace
