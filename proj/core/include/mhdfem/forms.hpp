#pragma once

#include <functional>
#include <memory>

#include "mhdfem/common.hpp"
#include "mhdfem/fem.hpp"

namespace mhdfem {

/// The spaces of one discretization at lowest order.
///
/// `curl_vec` holds the in-plane curl-space fields (H, U, alpha) and `curl_out`
/// the fields normal to the plane in 2D (J, E). In 3D both are NED0.
struct DiscreteSpaces {
  std::shared_ptr<const Mesh> mesh;
  SpacePtr velocity;
  SpacePtr density;
  SpacePtr field;
  SpacePtr curl_vec;
  SpacePtr curl_out;

  /// Velocity in RT0 when `inviscid`, CG1 vectors otherwise.
  static DiscreteSpaces make(std::shared_ptr<const Mesh> mesh, bool inviscid);
};

/// A field given cell by cell, possibly discontinuous across facets.
using PiecewiseField = std::function<Vec3(int cell, const Bary& lam)>;

/// Wraps a function by reference; `f` must outlive the returned field.
[[nodiscard]] PiecewiseField piecewise(const FeFunction& f);

/// Upwinding weight (1/pi) arctan(u.n / scale): the upwind coefficient beta_e(u)
/// divided by u.n, so no quotient by u.n is ever formed.
[[nodiscard]] double upwind_factor(double un, double scale);

struct UpwindSettings {
  bool enabled = true;
  double scale = 0.01;
};

/// a(w,u,v) = -int w . (u.grad v - v.grad u), summed cellwise.
[[nodiscard]] double form_a(const PiecewiseField& w, const FeFunction& u, const FeFunction& v);
[[nodiscard]] double form_a(const FeFunction& w, const FeFunction& u, const FeFunction& v);

/// DG momentum advection form a_h(U; w, u, v) with facet term
/// n x ({w} + alpha_e(U) [[w]]) . [[u x v]].
[[nodiscard]] double form_ah(const FeFunction& adv, const PiecewiseField& w, const FeFunction& u,
                             const FeFunction& v, const UpwindSettings& upwind);

/// b_h(f, g, u) for piecewise-constant f, g: sum_e int u.[[f]] {g}.
[[nodiscard]] double form_bh(const FeFunction& f, const FeFunction& g, const FeFunction& u);

/// Upwinded b_h(f,g,v) + sum_e int (1/pi) arctan(u.n/scale) (v.n) [[f]].[[g]].
[[nodiscard]] double form_bh_upwind(const FeFunction& adv, const FeFunction& f, const FeFunction& g,
                                    const FeFunction& v, const UpwindSettings& upwind);

/// d(u,v) = -int mu grad u : grad v + (lambda + mu) div u div v.
[[nodiscard]] double form_d(const FeFunction& u, const FeFunction& v, double mu, double lambda);

/// e_h(B, C) = -nu <curl_h B, curl_h C>.
[[nodiscard]] double form_eh(const FeFunction& b, const FeFunction& c, double nu, SpacePtr curl_out);

/// Auxiliary curl-space fields of the magnetic coupling, computed by mass solves.
struct AuxChain {
  FeFunction J;  // <J,K> = <B, curl K>          (curl_out)
  FeFunction H;  // <H,G> = <B, G>               (curl_vec)
  FeFunction U;  // <U,V> = <u, V>               (curl_vec)
  FeFunction E;  // <E,F> = -<U x H, F>          (curl_out)
  FeFunction alpha;  // <alpha,beta> = -<J x H, beta>  (curl_vec)
};

/// Builds the chain for the magnetic field b + background (constant) and velocity u.
[[nodiscard]] AuxChain build_aux_chain(const FeFunction& b, const Vec3& background, const FeFunction& u,
                                       const DiscreteSpaces& spaces);

/// Projection of a piecewise field onto a space (quadrature of degree 5).
[[nodiscard]] FeFunction project_piecewise(SpacePtr space, const PiecewiseField& f);

/// c_h(C, B, v) = <C, curl pi_curl(pi_curl B x pi_curl v)> assembled literally.
/// Reference path; the time stepper goes through the auxiliary chain instead.
/// In 2D the outer projection lands in the scalar space, so C pairs with an in-plane curl.
[[nodiscard]] double form_ch_direct(const PiecewiseField& c, const FeFunction& b, const FeFunction& v,
                                    const DiscreteSpaces& spaces);

/// <f, g> for piecewise fields (cell quadrature).
[[nodiscard]] double inner(const Mesh& mesh, const PiecewiseField& f, const PiecewiseField& g);

}  // namespace mhdfem
