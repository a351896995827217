#include "mhdfem/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "mhdfem/diagnostics.hpp"
#include "mhdfem/forms.hpp"

namespace mhdfem {

namespace {

struct Setup {
  std::shared_ptr<const Mesh> mesh;
  DiscreteSpaces spaces;    // CG1 velocity
  SpacePtr rt_velocity;     // RT0 velocity
};

Setup make_setup(int dim, int n) {
  const int div[3] = {n, n, n};
  Box box;
  if (dim == 2) box.upper.z() = 0.0;
  Setup s;
  s.mesh = std::make_shared<const Mesh>(build_structured_mesh(dim, std::span<const int>(div, dim), box));
  s.spaces = DiscreteSpaces::make(s.mesh, false);
  s.rt_velocity = s.spaces.field;
  return s;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  FeFunction random(const SpacePtr& space, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    Vector c(space->dof_count());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = d(gen_);
    return FeFunction(space, c);
  }

 private:
  std::mt19937_64 gen_;
};

struct Tracker {
  CheckResult r;
  Tracker(std::string name, double tol) {
    r.name = std::move(name);
    r.tolerance = tol;
  }
  void add(double violation) {
    ++r.trials;
    if (!std::isfinite(violation)) violation = INFINITY;
    r.worst = std::max(r.worst, std::abs(violation));
  }
  CheckResult done() {
    r.passed = r.trials > 0 && r.worst <= r.tolerance;
    return r;
  }
};

}  // namespace

std::vector<CheckResult> run_lemma_suite(std::uint64_t seed, int trials) {
  std::vector<CheckResult> out;
  Sampler rng(seed);
  const Setup tiny[2] = {make_setup(2, 1), make_setup(3, 1)};
  const Setup small[2] = {make_setup(2, 2), make_setup(3, 2)};

  {
    Tracker t("form_a antisymmetry a(w,u,v) + a(w,v,u)", 1e-12);
    for (const Setup& s : small)
      for (int k = 0; k < trials; ++k) {
        const FeFunction w = rng.random(s.spaces.velocity);
        const FeFunction u = rng.random(s.spaces.velocity);
        const FeFunction v = rng.random(s.spaces.velocity);
        t.add(form_a(w, u, v) + form_a(w, v, u));
      }
    out.push_back(t.done());
  }
  {
    Tracker t("form_ah antisymmetry in (u,v) for RT0 velocities", 1e-12);
    UpwindSettings up;
    for (const Setup& s : tiny)
      for (int k = 0; k < trials; ++k) {
        const FeFunction adv = rng.random(s.rt_velocity);
        const FeFunction w = rng.random(s.spaces.curl_vec);
        const FeFunction u = rng.random(s.rt_velocity);
        const FeFunction v = rng.random(s.rt_velocity);
        t.add(form_ah(adv, piecewise(w), u, v, up) + form_ah(adv, piecewise(w), v, u, up));
      }
    out.push_back(t.done());
  }
  {
    Tracker t("b_h(1,g,u) = 0", 0.0);
    for (const Setup* group : {tiny, small})
      for (int i = 0; i < 2; ++i) {
        const Setup& s = group[i];
        const FeFunction one(s.spaces.density, Vector::Ones(s.spaces.density->dof_count()));
        for (int k = 0; k < trials / 2; ++k) {
          const FeFunction g = rng.random(s.spaces.density);
          const FeFunction u = rng.random(i == 0 && group == tiny ? s.rt_velocity : s.spaces.velocity);
          t.add(form_bh(one, g, u));
        }
      }
    out.push_back(t.done());
  }
  {
    // 3D: c_h(A, curl A, v) = 0. The scalar 2D potential cannot pair with curl x, so
    // there the integrated identity <curl A, pi(pi curl A x pi v)> = 0 is checked.
    Tracker t("c_h(A, curl A, v) = 0", 1e-12);
    for (const Setup* group : {tiny, small})
      for (int i = 0; i < 2; ++i) {
        const Setup& s = group[i];
        for (int k = 0; k < trials / 2; ++k) {
          const FeFunction a = rng.random(s.spaces.curl_out);
          const FeFunction b = exact_curl(a, s.spaces.field);
          const FeFunction v = rng.random(k % 2 ? s.rt_velocity : s.spaces.velocity);
          if (s.mesh->dim() == 3) {
            t.add(form_ch_direct(piecewise(a), b, v, s.spaces));
          } else {
            const FeFunction hb = l2_project(s.spaces.curl_vec, b);
            const FeFunction hv = project_piecewise(s.spaces.curl_vec, piecewise(v));
            const FeFunction x = project_piecewise(s.spaces.curl_vec, [&](int c, const Bary& lam) {
              return Vec3(hb.evaluate(c, lam).cross(hv.evaluate(c, lam)));
            });
            t.add(inner(b, x));
          }
        }
      }
    out.push_back(t.done());
  }
  {
    Tracker te("<curl E, C> = c_h(C, B, u)", 1e-12);
    Tracker ta("<alpha, v> = c_h(pi(-B), B, v)", 1e-12);
    for (const Setup* group : {tiny, small})
      for (int i = 0; i < 2; ++i) {
        const Setup& s = group[i];
        for (int k = 0; k < trials / 2; ++k) {
          const FeFunction b = exact_curl(rng.random(s.spaces.curl_out), s.spaces.field);
          const FeFunction u = rng.random(k % 2 ? s.rt_velocity : s.spaces.velocity);
          const FeFunction c = rng.random(s.spaces.field);
          const AuxChain aux = build_aux_chain(b, Vec3::Zero(), u, s.spaces);
          const FeFunction curl_e = exact_curl(aux.E, s.spaces.field);
          te.add(inner(curl_e, c) - form_ch_direct(piecewise(c), b, u, s.spaces));
          const FeFunction minus_b(s.spaces.field, -b.coeffs());
          ta.add(inner(aux.alpha, u) - form_ch_direct(piecewise(minus_b), b, u, s.spaces));
        }
      }
    out.push_back(te.done());
    out.push_back(ta.done());
  }
  {
    Tracker t("kinetic/internal telescoping identity", 1e-12);
    EquationOfState eos;
    for (const Setup& s : small)
      for (int k = 0; k < trials; ++k) {
        const FeFunction r0 = rng.random(s.spaces.density, 0.5, 2.5);
        const FeFunction r1 = rng.random(s.spaces.density, 0.5, 2.5);
        const bool rt = k % 2;
        const FeFunction u0 = rng.random(rt ? s.rt_velocity : s.spaces.velocity);
        const FeFunction u1 = rng.random(rt ? s.rt_velocity : s.spaces.velocity);
        t.add(telescoping_residual(r0, r1, u0, u1, eos, 1.0));
      }
    out.push_back(t.done());
  }
  return out;
}

}  // namespace mhdfem
