#pragma once

#include <array>
#include <span>
#include <vector>

#include "mhdfem/common.hpp"

namespace mhdfem {

/// Axis-aligned box. In 2D the z extents are ignored.
struct Box {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Ones();
};

/// A (d-1)-face of the triangulation.
///
/// Interior facets carry two cells; `normal` is the unit normal pointing out of
/// `cell_plus` (the lower-indexed neighbour) into `cell_minus`. Boundary facets
/// have `cell_minus == -1` and an outward normal.
struct Facet {
  std::array<int, 3> vertices{-1, -1, -1};  // ascending; 2D uses the first two
  int cell_plus = -1;
  int cell_minus = -1;
  int local_plus = -1;   // local facet index in cell_plus (= opposite local vertex)
  int local_minus = -1;
  Vec3 normal = Vec3::Zero();
  double measure = 0.0;
  int boundary_side = -1;  // 0..2d-1 as (x-,x+,y-,y+,z-,z+), -1 if interior

  [[nodiscard]] bool is_boundary() const { return cell_minus < 0; }
};

/// Edge of the triangulation, oriented from the lower to the higher vertex index.
struct Edge {
  std::array<int, 2> vertices{-1, -1};
  bool on_boundary = false;
};

/// Local edge of a cell together with its orientation relative to the global edge.
struct CellEdge {
  int edge = -1;
  int local_a = -1;  // local vertex with the lower global index
  int local_b = -1;
};

/// Signed edge on the boundary loop of a 3D facet (Stokes orientation w.r.t. the facet normal).
struct FacetEdge {
  int edge = -1;
  double sign = 0.0;
};

/// Simplicial mesh of a box in 2D (triangles) or 3D (tetrahedra).
///
/// Immutable after construction. Cells are positively oriented. Local facet i of a
/// cell is the one opposite local vertex i.
class Mesh {
 public:
  Mesh(int dim, std::vector<Vec3> vertices, std::vector<std::array<int, 4>> cells, Box box);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const Box& box() const { return box_; }

  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
  [[nodiscard]] int num_facets() const { return static_cast<int>(facets_.size()); }
  [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }
  [[nodiscard]] int vertices_per_cell() const { return dim_ + 1; }
  [[nodiscard]] int edges_per_cell() const { return dim_ == 2 ? 3 : 6; }

  [[nodiscard]] const std::vector<Vec3>& vertices() const { return vertices_; }
  [[nodiscard]] const Vec3& vertex(int v) const { return vertices_[v]; }
  [[nodiscard]] bool vertex_on_boundary(int v) const { return vertex_boundary_[v]; }

  [[nodiscard]] const std::array<int, 4>& cell(int c) const { return cells_[c]; }
  [[nodiscard]] double volume(int c) const { return volumes_[c]; }
  [[nodiscard]] const Vec3& centroid(int c) const { return centroids_[c]; }
  [[nodiscard]] double diameter(int c) const;
  [[nodiscard]] double max_diameter() const;

  /// Gradients of the barycentric coordinate functions on cell c.
  [[nodiscard]] const std::array<Vec3, 4>& bary_gradients(int c) const { return bary_grads_[c]; }

  /// Physical point of barycentric coordinates lam in cell c.
  [[nodiscard]] Vec3 point(int c, const Bary& lam) const;

  [[nodiscard]] const std::vector<Facet>& facets() const { return facets_; }
  [[nodiscard]] const Facet& facet(int f) const { return facets_[f]; }
  [[nodiscard]] int cell_facet(int c, int local) const { return cell_facets_[c][local]; }

  /// +1 when the facet normal points out of cell c, -1 otherwise.
  [[nodiscard]] double facet_orientation(int c, int local) const;

  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const Edge& edge(int e) const { return edges_[e]; }
  [[nodiscard]] const CellEdge& cell_edge(int c, int local) const { return cell_edges_[c][local]; }

  /// Boundary loop of a facet: 3 signed edges in 3D. In 2D the facet is itself an edge.
  [[nodiscard]] std::span<const FacetEdge> facet_edges(int f) const;

  /// Barycentric coordinates (in cell c) of the facet's vertex with local facet-vertex index k.
  [[nodiscard]] Bary facet_point_in_cell(int f, int c, const Bary& facet_lam) const;

 private:
  void build_topology();

  int dim_;
  Box box_;
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<double> volumes_;
  std::vector<Vec3> centroids_;
  std::vector<std::array<Vec3, 4>> bary_grads_;
  std::vector<Facet> facets_;
  std::vector<std::array<int, 4>> cell_facets_;
  std::vector<Edge> edges_;
  std::vector<std::array<CellEdge, 6>> cell_edges_;
  std::vector<std::array<FacetEdge, 3>> facet_edges_;
  std::vector<bool> vertex_boundary_;
};

/// Uniform mesh of a box: each square split along its (0,0)-(1,1) diagonal in 2D,
/// each cube split into the six Kuhn tetrahedra sharing the main diagonal in 3D.
[[nodiscard]] Mesh build_structured_mesh(int dim, std::span<const int> divisions, const Box& bounds);

struct InteriorFacet {
  int facet = -1;
  int cell_plus = -1;
  int cell_minus = -1;
  Vec3 normal = Vec3::Zero();
  double measure = 0.0;
};

/// Interior facets in ascending order of their (sorted) vertex tuples.
[[nodiscard]] std::vector<InteriorFacet> interior_facets(const Mesh& mesh);

}  // namespace mhdfem
