#include "mhdfem/assembler.hpp"

#include <algorithm>
#include <cmath>

#include "mhdfem/quadrature.hpp"

namespace mhdfem {

namespace {

int dof_or_none(const LocalDof& d, int offset) { return d.dof < 0 ? -1 : offset + d.dof; }

void append_slots(std::vector<int>& out, const FeSpace& space, int cell, int offset) {
  for (const LocalDof& d : space.cell_dofs(cell)) out.push_back(dof_or_none(d, offset));
}

Vec3 combine(const Vec3* basis, const double* coeffs, int n) {
  Vec3 v = Vec3::Zero();
  for (int i = 0; i < n; ++i) v += coeffs[i] * basis[i];
  return v;
}

Mat3 combine(const Mat3* basis, const double* coeffs, int n) {
  Mat3 m = Mat3::Zero();
  for (int i = 0; i < n; ++i) m += coeffs[i] * basis[i];
  return m;
}

}  // namespace

StepSystem::StepSystem(DiscreteSpaces spaces, Physics physics) : spaces_(std::move(spaces)), phys_(std::move(physics)) {
  if (!spaces_.mesh || !spaces_.velocity || !spaces_.field || !spaces_.curl_vec || !spaces_.curl_out)
    throw UsageError("StepSystem needs a complete set of spaces");
  if (spaces_.velocity->family() != (phys_.div_velocity() ? Family::Rt0 : Family::Cg1Vector))
    throw UsageError("velocity space does not match the variant");
  int off = 0;
  auto block = [&off](int& start, int& n, int count) {
    start = off;
    n = count;
    off += count;
  };
  const Mesh& m = *spaces_.mesh;
  block(lay_.u, lay_.nu, spaces_.velocity->dof_count());
  block(lay_.rho, lay_.nrho, m.num_cells());
  block(lay_.s, lay_.ns, phys_.has_entropy() ? m.num_cells() : 0);
  block(lay_.b, lay_.nb, spaces_.field->dof_count());
  block(lay_.J, lay_.nJ, spaces_.curl_out->dof_count());
  block(lay_.H, lay_.nH, spaces_.curl_vec->dof_count());
  block(lay_.U, lay_.nU, spaces_.curl_vec->dof_count());
  block(lay_.E, lay_.nE, spaces_.curl_out->dof_count());
  block(lay_.alpha, lay_.nalpha, spaces_.curl_vec->dof_count());
  lay_.size = off;

  ifacets_ = interior_facets(m);
  curl_ = curl_matrix(*spaces_.curl_out, *spaces_.field);
  build_tables();
  build_kernels();
}

void StepSystem::build_tables() {
  const Mesh& m = *spaces_.mesh;
  const QuadratureRule& q = cell_rule(m.dim());
  BasisEval be;
  auto fill = [&](Table& t, const FeSpace& space, bool want_jac, bool want_curl) {
    t.nl = space.local_count();
    t.np = q.size();
    const std::size_t n = static_cast<std::size_t>(m.num_cells()) * t.np * t.nl;
    t.value.resize(n);
    if (want_jac) t.jac.resize(n);
    if (want_curl) t.curl.resize(n);
    for (int c = 0; c < m.num_cells(); ++c)
      for (int p = 0; p < t.np; ++p) {
        space.eval(c, q.points[p], be);
        const std::size_t base = (static_cast<std::size_t>(c) * t.np + p) * t.nl;
        for (int i = 0; i < t.nl; ++i) {
          t.value[base + i] = be.value[i];
          if (want_jac) t.jac[base + i] = be.jacobian[i];
          if (want_curl) t.curl[base + i] = curl_of(be.jacobian[i]);
        }
      }
  };
  fill(tv_, *spaces_.velocity, true, false);
  fill(tb_, *spaces_.field, false, false);
  fill(tcv_, *spaces_.curl_vec, false, false);
  fill(tco_, *spaces_.curl_out, false, true);

  auto local_mass = [&](const Table& t, std::vector<Eigen::MatrixXd>& out) {
    out.assign(m.num_cells(), Eigen::MatrixXd::Zero(t.nl, t.nl));
    for (int c = 0; c < m.num_cells(); ++c)
      for (int p = 0; p < t.np; ++p) {
        const double w = q.weights[p] * m.volume(c);
        const Vec3* v = &t.value[(static_cast<std::size_t>(c) * t.np + p) * t.nl];
        for (int i = 0; i < t.nl; ++i)
          for (int j = 0; j < t.nl; ++j) out[c](i, j) += w * v[i].dot(v[j]);
      }
  };
  local_mass(tv_, mass_v_);
  local_mass(tcv_, mass_cv_);
  local_mass(tco_, mass_co_);

  phi_avg_.assign(m.num_cells(), 0.0);
  for (int c = 0; c < m.num_cells(); ++c)
    for (int p = 0; p < q.size(); ++p) phi_avg_[c] += q.weights[p] * phys_.potential(m.point(c, q.points[p]));

  const QuadratureRule& qf = facet_rule(m.dim());
  npf_ = qf.size();
  const int nv = tv_.nl;
  facet_vel_.resize(ifacets_.size() * npf_ * 2 * nv);
  facet_w_.resize(ifacets_.size() * npf_);
  for (std::size_t f = 0; f < ifacets_.size(); ++f) {
    const InteriorFacet& F = ifacets_[f];
    for (int p = 0; p < npf_; ++p) {
      facet_w_[f * npf_ + p] = qf.weights[p] * F.measure;
      for (int side = 0; side < 2; ++side) {
        const int c = side == 0 ? F.cell_plus : F.cell_minus;
        spaces_.velocity->eval(c, m.facet_point_in_cell(F.facet, c, qf.points[p]), be);
        for (int i = 0; i < nv; ++i) facet_vel_[((f * npf_ + p) * 2 + side) * nv + i] = be.value[i];
      }
    }
  }
}

void StepSystem::add_kernel(Kind kind, int entity, const std::vector<int>& cols, const std::vector<int>& rows) {
  Kernel k{kind, entity, static_cast<int>(cols_.size()), 0, static_cast<int>(rows_.size()), 0};
  cols_.insert(cols_.end(), cols.begin(), cols.end());
  rows_.insert(rows_.end(), rows.begin(), rows.end());
  k.col_end = static_cast<int>(cols_.size());
  k.row_end = static_cast<int>(rows_.size());
  coef_.resize(cols_.size(), 0.0);
  max_local_ = std::max({max_local_, k.col_end - k.col_begin, k.row_end - k.row_begin});
  kernels_.push_back(k);
}

void StepSystem::build_kernels() {
  const Mesh& m = *spaces_.mesh;
  const FeSpace& V = *spaces_.velocity;
  const FeSpace& R = *spaces_.field;
  const FeSpace& CV = *spaces_.curl_vec;
  const FeSpace& CO = *spaces_.curl_out;
  const bool ent = phys_.has_entropy();
  std::vector<int> cols;
  std::vector<int> rows;
  auto reset = [&] {
    cols.clear();
    rows.clear();
  };

  for (int c = 0; c < m.num_cells(); ++c) {
    reset();
    append_slots(cols, V, c, lay_.u);
    cols.push_back(lay_.rho + c);
    append_slots(cols, CV, c, lay_.alpha);
    append_slots(rows, V, c, lay_.u);
    add_kernel(Kind::Momentum, c, cols, rows);

    reset();
    cols.push_back(lay_.rho + c);
    if (ent) cols.push_back(lay_.s + c);
    rows = cols;
    add_kernel(Kind::Scalar, c, cols, rows);

    reset();
    append_slots(cols, R, c, lay_.b);
    append_slots(cols, CO, c, lay_.J);
    append_slots(rows, CO, c, lay_.J);
    add_kernel(Kind::AuxJ, c, cols, rows);

    reset();
    append_slots(cols, R, c, lay_.b);
    append_slots(cols, CV, c, lay_.H);
    append_slots(rows, CV, c, lay_.H);
    add_kernel(Kind::AuxH, c, cols, rows);

    reset();
    append_slots(cols, V, c, lay_.u);
    append_slots(cols, CV, c, lay_.U);
    append_slots(rows, CV, c, lay_.U);
    add_kernel(Kind::AuxU, c, cols, rows);

    reset();
    append_slots(cols, CV, c, lay_.U);
    append_slots(cols, CV, c, lay_.H);
    append_slots(cols, CO, c, lay_.E);
    append_slots(rows, CO, c, lay_.E);
    add_kernel(Kind::AuxE, c, cols, rows);

    reset();
    append_slots(cols, CO, c, lay_.J);
    append_slots(cols, CV, c, lay_.H);
    append_slots(cols, CV, c, lay_.alpha);
    append_slots(rows, CV, c, lay_.alpha);
    add_kernel(Kind::AuxAlpha, c, cols, rows);
  }

  for (std::size_t f = 0; f < ifacets_.size(); ++f) {
    const InteriorFacet& F = ifacets_[f];
    reset();
    append_slots(cols, V, F.cell_plus, lay_.u);
    append_slots(cols, V, F.cell_minus, lay_.u);
    rows = cols;
    cols.push_back(lay_.rho + F.cell_plus);
    cols.push_back(lay_.rho + F.cell_minus);
    if (ent) {
      cols.push_back(lay_.s + F.cell_plus);
      cols.push_back(lay_.s + F.cell_minus);
    }
    rows.insert(rows.end(), cols.begin() + 2 * V.local_count(), cols.end());
    add_kernel(Kind::Facet, static_cast<int>(f), cols, rows);
  }

  const Eigen::SparseMatrix<double, Eigen::RowMajor> cr = curl_;
  const bool resistive = phys_.nu != 0.0;
  for (int i = 0; i < lay_.nb; ++i) {
    reset();
    std::vector<double> coef{1.0};
    cols.push_back(lay_.b + i);
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(cr, i); it; ++it) {
      cols.push_back(lay_.E + static_cast<int>(it.col()));
      coef.push_back(it.value());
    }
    if (resistive)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(cr, i); it; ++it) {
        cols.push_back(lay_.J + static_cast<int>(it.col()));
        coef.push_back(phys_.nu * it.value());
      }
    rows.push_back(lay_.b + i);
    add_kernel(Kind::Magnetic, i, cols, rows);
    std::copy(coef.begin(), coef.end(), coef_.begin() + kernels_.back().col_begin);
  }
}

double StepSystem::old_local(const FeFunction& f, const FeSpace& space, int c, int i) const {
  const LocalDof d = space.cell_dofs(c)[i];
  return d.dof < 0 ? 0.0 : f.coeffs()[d.dof];
}

void StepSystem::set_previous(const State& old, double dt) {
  if (!(dt != 0.0) || !std::isfinite(dt)) throw UsageError("time step must be finite and nonzero");
  validate_state(old, spaces_, phys_);
  old_ = old;
  dt_ = dt;
  const Mesh& m = *spaces_.mesh;
  const int nv = tv_.nl;
  const int nb = tb_.nl;
  old_u_.resize(static_cast<std::size_t>(m.num_cells()) * nv);
  old_b_.resize(static_cast<std::size_t>(m.num_cells()) * nb);
  for (int c = 0; c < m.num_cells(); ++c) {
    for (int i = 0; i < nv; ++i) old_u_[c * nv + i] = old_local(old_.u, *spaces_.velocity, c, i);
    for (int i = 0; i < nb; ++i) old_b_[c * nb + i] = old_local(old_.b, *spaces_.field, c, i);
  }
}

void StepSystem::eval_kernel(const Kernel& k, const double* xl, double* rl) const {
  switch (k.kind) {
    case Kind::Momentum: eval_momentum(k.entity, xl, rl); break;
    case Kind::Scalar: eval_scalar(k.entity, xl, rl); break;
    case Kind::Facet: eval_facet(k.entity, xl, rl); break;
    case Kind::Magnetic: eval_magnetic(k, xl, rl); break;
    case Kind::AuxJ:
    case Kind::AuxH:
    case Kind::AuxU: eval_aux_source(k.kind, k.entity, xl, rl); break;
    case Kind::AuxE:
    case Kind::AuxAlpha: eval_aux_product(k.kind, k.entity, xl, rl); break;
  }
}

void StepSystem::eval_momentum(int c, const double* xl, double* rl) const {
  const int nv = tv_.nl;
  const int na = tcv_.nl;
  const int np = tv_.np;
  const double* un = xl;
  const double rhon = xl[nv];
  const double* al = xl + nv + 1;
  const double* uo = &old_u_[static_cast<std::size_t>(c) * nv];
  const double rhoo = old_.rho.coeffs()[c];
  const double mu = phys_.mu;
  const double lm = phys_.lambda + phys_.mu;
  const bool viscous = mu != 0.0 || phys_.lambda != 0.0;
  const QuadratureRule& q = cell_rule(spaces_.mesh->dim());
  const double vol = spaces_.mesh->volume(c);
  std::fill(rl, rl + nv, 0.0);
  for (int p = 0; p < np; ++p) {
    const std::size_t base = static_cast<std::size_t>(c) * np + p;
    const Vec3* phi = &tv_.value[base * nv];
    const Mat3* gphi = &tv_.jac[base * nv];
    const Vec3 Uo = combine(phi, uo, nv);
    const Vec3 Un = combine(phi, un, nv);
    const Mat3 Jm = 0.5 * (combine(gphi, uo, nv) + combine(gphi, un, nv));
    const Vec3 A = combine(&tcv_.value[base * na], al, na);
    const Vec3 um = 0.5 * (Uo + Un);
    const Vec3 w = 0.5 * (rhoo * Uo + rhon * Un);
    const Vec3 lin = (rhon * Un - rhoo * Uo) / dt_ + A;
    const double W = q.weights[p] * vol;
    const double divm = Jm.trace();
    for (int i = 0; i < nv; ++i) {
      double val = lin.dot(phi[i]) - w.dot(gphi[i] * um - Jm * phi[i]);
      if (viscous) val += mu * Jm.cwiseProduct(gphi[i]).sum() + lm * divm * gphi[i].trace();
      rl[i] += W * val;
    }
  }
}

void StepSystem::eval_scalar(int c, const double* xl, double* rl) const {
  const double vol = spaces_.mesh->volume(c);
  rl[0] = vol * (xl[0] - old_.rho.coeffs()[c]) / dt_;
  if (phys_.has_entropy()) rl[1] = vol * (xl[1] - old_.s.coeffs()[c]) / dt_;
}

void StepSystem::eval_facet(int f, const double* xl, double* rl) const {
  const InteriorFacet& F = ifacets_[f];
  const int nv = tv_.nl;
  const bool ent = phys_.has_entropy();
  const int cell[2] = {F.cell_plus, F.cell_minus};
  const double* un[2] = {xl, xl + nv};
  const double* uo[2] = {&old_u_[static_cast<std::size_t>(cell[0]) * nv], &old_u_[static_cast<std::size_t>(cell[1]) * nv]};
  double rhon[2], rhoo[2], sn[2] = {0, 0}, so[2] = {0, 0};
  double th1[2], th2[2] = {0, 0};
  const EquationOfState& eos = phys_.eos;
  for (int k = 0; k < 2; ++k) {
    const int c = cell[k];
    rhon[k] = xl[2 * nv + k];
    rhoo[k] = old_.rho.coeffs()[c];
    const Eigen::Map<const Eigen::VectorXd> a(uo[k], nv);
    const Eigen::Map<const Eigen::VectorXd> b(un[k], nv);
    const double ke = 0.5 * a.dot(mass_v_[c] * b) / spaces_.mesh->volume(c);
    if (ent) {
      sn[k] = xl[2 * nv + 2 + k];
      so[k] = old_.s.coeffs()[c];
      th1[k] = ke - phi_avg_[c] - 0.5 * (delta1(rhoo[k], rhon[k], so[k], eos) + delta1(rhoo[k], rhon[k], sn[k], eos));
      th2[k] = -0.5 * (delta2(so[k], sn[k], rhoo[k], eos) + delta2(so[k], sn[k], rhon[k], eos));
    } else {
      th1[k] = ke - delta_quotient(rhoo[k], rhon[k], eos);
    }
  }
  const double rm[2] = {0.5 * (rhoo[0] + rhon[0]), 0.5 * (rhoo[1] + rhon[1])};
  const double sm[2] = {0.5 * (so[0] + sn[0]), 0.5 * (so[1] + sn[1])};
  const double d1 = th1[0] - th1[1];
  const double d2 = th2[0] - th2[1];
  const Vec3& n = F.normal;
  const bool upwind = phys_.upwind.enabled;
  const bool dg_adv = phys_.div_velocity();

  const int nrows = 2 * nv + (ent ? 4 : 2);
  std::fill(rl, rl + nrows, 0.0);
  for (int p = 0; p < npf_; ++p) {
    const double W = facet_w_[static_cast<std::size_t>(f) * npf_ + p];
    const Vec3* phi[2];
    Vec3 Uo[2], Un[2], um[2];
    for (int k = 0; k < 2; ++k) {
      phi[k] = &facet_vel_[((static_cast<std::size_t>(f) * npf_ + p) * 2 + k) * nv];
      Uo[k] = combine(phi[k], uo[k], nv);
      Un[k] = combine(phi[k], un[k], nv);
      um[k] = 0.5 * (Uo[k] + Un[k]);
    }
    const double umn = 0.5 * (um[0] + um[1]).dot(n);
    const double up = upwind ? upwind_factor(umn, phys_.upwind.scale) : 0.0;
    double g = d1 * (0.5 * (rm[0] + rm[1]) + up * (rm[0] - rm[1]));
    if (ent) g += d2 * (0.5 * (sm[0] + sm[1]) + up * (sm[0] - sm[1]));
    Vec3 qv = Vec3::Zero();
    if (dg_adv) {
      const Vec3 w0 = 0.5 * (rhoo[0] * Uo[0] + rhon[0] * Un[0]);
      const Vec3 w1 = 0.5 * (rhoo[1] * Uo[1] + rhon[1] * Un[1]);
      qv = n.cross(0.5 * (w0 + w1) + up * (w0 - w1));
    }
    for (int k = 0; k < 2; ++k) {
      const double sgn = k == 0 ? 1.0 : -1.0;
      for (int i = 0; i < nv; ++i) {
        double val = 0.5 * phi[k][i].dot(n) * g;
        if (dg_adv) val += sgn * qv.dot(um[k].cross(phi[k][i]));
        rl[k * nv + i] += W * val;
      }
    }
    const double fr = umn * (0.5 * (rm[0] + rm[1]) + up * (rm[0] - rm[1]));
    rl[2 * nv] += W * fr;
    rl[2 * nv + 1] -= W * fr;
    if (ent) {
      const double fs = umn * (0.5 * (sm[0] + sm[1]) + up * (sm[0] - sm[1]));
      rl[2 * nv + 2] += W * fs;
      rl[2 * nv + 3] -= W * fs;
    }
  }
}

void StepSystem::eval_magnetic(const Kernel& k, const double* xl, double* rl) const {
  double r = (xl[0] - old_.b.coeffs()[k.entity]) / dt_;
  const int n = k.col_end - k.col_begin;
  for (int m = 1; m < n; ++m) r += coef_[k.col_begin + m] * xl[m];
  rl[0] = r;
}

void StepSystem::eval_aux_source(Kind kind, int c, const double* xl, double* rl) const {
  const QuadratureRule& q = cell_rule(spaces_.mesh->dim());
  const double vol = spaces_.mesh->volume(c);
  const Table& src = kind == Kind::AuxU ? tv_ : tb_;
  const Table& tgt = kind == Kind::AuxJ ? tco_ : tcv_;
  const Eigen::MatrixXd& mass = kind == Kind::AuxJ ? mass_co_[c] : mass_cv_[c];
  const int ns = src.nl;
  const int nt = tgt.nl;
  const double* xs = xl;
  const double* xt = xl + ns;
  const double* old = kind == Kind::AuxU ? &old_u_[static_cast<std::size_t>(c) * ns] : &old_b_[static_cast<std::size_t>(c) * ns];
  const Vec3 bg = kind == Kind::AuxU ? Vec3::Zero() : phys_.background;
  for (int i = 0; i < nt; ++i) {
    double s = 0.0;
    for (int j = 0; j < nt; ++j) s += mass(i, j) * xt[j];
    rl[i] = s;
  }
  for (int p = 0; p < src.np; ++p) {
    const std::size_t base = static_cast<std::size_t>(c) * src.np + p;
    const Vec3* phi = &src.value[base * ns];
    const Vec3 f = bg + 0.5 * (combine(phi, old, ns) + combine(phi, xs, ns));
    const double W = q.weights[p] * vol;
    const Vec3* test = kind == Kind::AuxJ ? &tgt.curl[base * nt] : &tgt.value[base * nt];
    for (int i = 0; i < nt; ++i) rl[i] -= W * f.dot(test[i]);
  }
}

void StepSystem::eval_aux_product(Kind kind, int c, const double* xl, double* rl) const {
  const QuadratureRule& q = cell_rule(spaces_.mesh->dim());
  const double vol = spaces_.mesh->volume(c);
  // AuxE: (U, H) -> E in curl_out; AuxAlpha: (J, H) -> alpha in curl_vec.
  const Table& ta = kind == Kind::AuxE ? tcv_ : tco_;
  const Table& tgt = kind == Kind::AuxE ? tco_ : tcv_;
  const Eigen::MatrixXd& mass = kind == Kind::AuxE ? mass_co_[c] : mass_cv_[c];
  const int na = ta.nl;
  const int nh = tcv_.nl;
  const int nt = tgt.nl;
  const double* xa = xl;
  const double* xh = xl + na;
  const double* xt = xl + na + nh;
  for (int i = 0; i < nt; ++i) {
    double s = 0.0;
    for (int j = 0; j < nt; ++j) s += mass(i, j) * xt[j];
    rl[i] = s;
  }
  for (int p = 0; p < ta.np; ++p) {
    const std::size_t base = static_cast<std::size_t>(c) * ta.np + p;
    const Vec3 a = combine(&ta.value[base * na], xa, na);
    const Vec3 h = combine(&tcv_.value[base * nh], xh, nh);
    const Vec3 f = a.cross(h);
    const double W = q.weights[p] * vol;
    const Vec3* test = &tgt.value[base * nt];
    for (int i = 0; i < nt; ++i) rl[i] += W * f.dot(test[i]);
  }
}

bool StepSystem::residual(const Vector& x, Vector& r) const {
  if (x.size() != lay_.size) throw UsageError("StepSystem::residual: wrong unknown length");
  for (int c = 0; c < lay_.nrho; ++c)
    if (!(x[lay_.rho + c] > 0.0)) return false;
  if (!x.allFinite()) return false;
  r.setZero(lay_.size);
  std::vector<double> xl(max_local_);
  std::vector<double> rl(max_local_);
  for (const Kernel& k : kernels_) {
    for (int m = k.col_begin; m < k.col_end; ++m) xl[m - k.col_begin] = cols_[m] < 0 ? 0.0 : x[cols_[m]];
    eval_kernel(k, xl.data(), rl.data());
    for (int m = k.row_begin; m < k.row_end; ++m)
      if (rows_[m] >= 0) r[rows_[m]] += rl[m - k.row_begin];
  }
  return true;
}

SparseMatrix StepSystem::jacobian(const Vector& x, double fd_scale) const {
  std::vector<Triplet> trip;
  std::vector<double> xl(max_local_);
  std::vector<double> r0(max_local_);
  std::vector<double> r1(max_local_);
  for (const Kernel& k : kernels_) {
    const int nc = k.col_end - k.col_begin;
    const int nr = k.row_end - k.row_begin;
    for (int m = 0; m < nc; ++m) xl[m] = cols_[k.col_begin + m] < 0 ? 0.0 : x[cols_[k.col_begin + m]];
    eval_kernel(k, xl.data(), r0.data());
    for (int m = 0; m < nc; ++m) {
      const int col = cols_[k.col_begin + m];
      if (col < 0) continue;
      const double x0 = xl[m];
      const double h = (x0 + std::exp2(std::round(std::log2(fd_scale * (1.0 + std::abs(x0)))))) - x0;
      xl[m] = x0 + h;
      eval_kernel(k, xl.data(), r1.data());
      xl[m] = x0;
      for (int i = 0; i < nr; ++i) {
        const int row = rows_[k.row_begin + i];
        if (row >= 0) trip.emplace_back(row, col, (r1[i] - r0[i]) / h);
      }
    }
  }
  SparseMatrix jac(lay_.size, lay_.size);
  jac.setFromTriplets(trip.begin(), trip.end());
  jac.makeCompressed();
  return jac;
}

Vector StepSystem::pack(const State& next) const {
  validate_state(next, spaces_, phys_);
  Vector x = Vector::Zero(lay_.size);
  x.segment(lay_.u, lay_.nu) = next.u.coeffs();
  x.segment(lay_.rho, lay_.nrho) = next.rho.coeffs();
  if (lay_.ns > 0) x.segment(lay_.s, lay_.ns) = next.s.coeffs();
  x.segment(lay_.b, lay_.nb) = next.b.coeffs();
  const FeFunction bm(spaces_.field, 0.5 * (old_.b.coeffs() + next.b.coeffs()));
  const FeFunction um(spaces_.velocity, 0.5 * (old_.u.coeffs() + next.u.coeffs()));
  const AuxChain aux = build_aux_chain(bm, phys_.background, um, spaces_);
  x.segment(lay_.J, lay_.nJ) = aux.J.coeffs();
  x.segment(lay_.H, lay_.nH) = aux.H.coeffs();
  x.segment(lay_.U, lay_.nU) = aux.U.coeffs();
  x.segment(lay_.E, lay_.nE) = aux.E.coeffs();
  x.segment(lay_.alpha, lay_.nalpha) = aux.alpha.coeffs();
  return x;
}

Vector StepSystem::initial_guess() const { return pack(old_); }

State StepSystem::extract(const Vector& x) const {
  if (x.size() != lay_.size) throw UsageError("StepSystem::extract: wrong unknown length");
  State st;
  st.t = old_.t + dt_;
  st.u = FeFunction(spaces_.velocity, x.segment(lay_.u, lay_.nu));
  st.rho = FeFunction(spaces_.density, x.segment(lay_.rho, lay_.nrho));
  if (lay_.ns > 0) st.s = FeFunction(spaces_.density, x.segment(lay_.s, lay_.ns));
  Vector src = x.segment(lay_.E, lay_.nE);
  if (phys_.nu != 0.0) src += phys_.nu * x.segment(lay_.J, lay_.nJ);
  st.b = FeFunction(spaces_.field, old_.b.coeffs() - dt_ * (curl_ * src));
  return st;
}

}  // namespace mhdfem
