#pragma once

#include <vector>

#include "mhdfem/forms.hpp"
#include "mhdfem/physics.hpp"
#include "mhdfem/sparse.hpp"
#include "mhdfem/state.hpp"

namespace mhdfem {

/// Offsets of the unknown blocks of one step. The auxiliary curl-space fields are
/// kept as unknowns next to (u', rho', s', b') so that every equation stays local
/// and the Jacobian sparse.
struct BlockLayout {
  int u = 0, rho = 0, s = 0, b = 0, J = 0, H = 0, U = 0, E = 0, alpha = 0;
  int nu = 0, nrho = 0, ns = 0, nb = 0, nJ = 0, nH = 0, nU = 0, nE = 0, nalpha = 0;
  int size = 0;
};

/// Residual and Jacobian of the midpoint step from a fixed previous state.
///
/// Rows: momentum (velocity test space), density, [entropy], magnetic in coefficient
/// form (b' - b)/dt + curl(E + nu J), then the five auxiliary relations
///   M J = <B, curl K>,  M H = <B, G>,  M U = <u, V>,  M E = -<U x H, F>,  M alpha = -<J x H, beta>
/// with B, u at the midpoint and B including the background field.
class StepSystem {
 public:
  StepSystem(DiscreteSpaces spaces, Physics physics);

  [[nodiscard]] const BlockLayout& layout() const { return lay_; }
  [[nodiscard]] const DiscreteSpaces& spaces() const { return spaces_; }
  [[nodiscard]] const Physics& physics() const { return phys_; }

  void set_previous(const State& old, double dt);
  [[nodiscard]] double dt() const { return dt_; }

  /// Previous state with auxiliaries consistent with it.
  [[nodiscard]] Vector initial_guess() const;

  /// Writes R(x); false when some density in x is nonpositive.
  bool residual(const Vector& x, Vector& r) const;

  /// Jacobian by forward differences of each element contribution, assembled.
  [[nodiscard]] SparseMatrix jacobian(const Vector& x, double fd_scale) const;

  /// New state from a solution; b' is recomputed from the magnetic equation so that
  /// b' - b lies exactly in the range of the discrete curl.
  [[nodiscard]] State extract(const Vector& x) const;

  /// Packs a state plus auxiliaries into the unknown layout (auxiliaries from the
  /// midpoint of the previous state and `next`).
  [[nodiscard]] Vector pack(const State& next) const;

  [[nodiscard]] int kernel_count() const { return static_cast<int>(kernels_.size()); }

 private:
  enum class Kind { Momentum, Scalar, Facet, Magnetic, AuxJ, AuxH, AuxU, AuxE, AuxAlpha };
  struct Kernel {
    Kind kind;
    int entity;  // cell, interior facet (index into ifacets_), or RT0 dof
    int col_begin, col_end;
    int row_begin, row_end;
  };
  struct Table {
    int nl = 0;
    int np = 0;
    std::vector<Vec3> value;
    std::vector<Mat3> jac;
    std::vector<Vec3> curl;
  };

  void build_tables();
  void build_kernels();
  void add_kernel(Kind kind, int entity, const std::vector<int>& cols, const std::vector<int>& rows);
  void eval_kernel(const Kernel& k, const double* xl, double* rl) const;

  void eval_momentum(int c, const double* xl, double* rl) const;
  void eval_scalar(int c, const double* xl, double* rl) const;
  void eval_facet(int f, const double* xl, double* rl) const;
  void eval_magnetic(const Kernel& k, const double* xl, double* rl) const;
  void eval_aux_source(Kind kind, int c, const double* xl, double* rl) const;
  void eval_aux_product(Kind kind, int c, const double* xl, double* rl) const;

  [[nodiscard]] double old_local(const FeFunction& f, const FeSpace& space, int c, int i) const;

  DiscreteSpaces spaces_;
  Physics phys_;
  BlockLayout lay_;
  double dt_ = 0.0;
  State old_;

  std::vector<InteriorFacet> ifacets_;
  Table tv_, tb_, tcv_, tco_;  // velocity, field, curl_vec, curl_out on the cell rule
  std::vector<Vec3> facet_vel_;  // [((f * npf + p) * 2 + side) * nv + i]
  std::vector<double> facet_w_;  // facet quadrature weight times measure
  int npf_ = 0;
  std::vector<Eigen::MatrixXd> mass_v_, mass_cv_, mass_co_;
  std::vector<double> phi_avg_;
  SparseMatrix curl_;  // curl_out -> RT0

  // Old-state data gathered per cell (local slots, eliminated slots hold 0).
  std::vector<double> old_u_, old_b_;

  std::vector<Kernel> kernels_;
  std::vector<int> cols_, rows_;
  std::vector<double> coef_;
  int max_local_ = 0;
};

}  // namespace mhdfem
