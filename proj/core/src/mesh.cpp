#include "mhdfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <Eigen/LU>

namespace mhdfem {

namespace {

constexpr std::array<std::array<int, 2>, 6> kTetEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

double signed_measure(int dim, const std::array<Vec3, 4>& x) {
  if (dim == 2) {
    const Vec3 a = x[1] - x[0];
    const Vec3 b = x[2] - x[0];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  return (x[1] - x[0]).dot((x[2] - x[0]).cross(x[3] - x[0])) / 6.0;
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Vec3> vertices, std::vector<std::array<int, 4>> cells, Box box)
    : dim_(dim), box_(std::move(box)), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (dim_ != 2 && dim_ != 3) throw ConfigError("mesh dimension must be 2 or 3");
  const int nv = dim_ + 1;
  volumes_.resize(cells_.size());
  centroids_.resize(cells_.size());
  bary_grads_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto& cv = cells_[c];
    if (dim_ == 2) cv[3] = -1;
    std::array<Vec3, 4> x{};
    for (int i = 0; i < nv; ++i) x[i] = vertices_.at(cv[i]);
    double vol = signed_measure(dim_, x);
    if (vol < 0.0) {
      std::swap(cv[nv - 2], cv[nv - 1]);
      std::swap(x[nv - 2], x[nv - 1]);
      vol = -vol;
    }
    if (!(vol > 0.0)) throw ConfigError("degenerate cell " + std::to_string(c));
    volumes_[c] = vol;
    Vec3 centroid = Vec3::Zero();
    for (int i = 0; i < nv; ++i) centroid += x[i];
    centroids_[c] = centroid / nv;

    auto& g = bary_grads_[c];
    if (dim_ == 2) {
      Eigen::Matrix2d t;
      t.col(0) = (x[1] - x[0]).head<2>();
      t.col(1) = (x[2] - x[0]).head<2>();
      const Eigen::Matrix2d inv = t.inverse();
      g[1] = Vec3(inv(0, 0), inv(0, 1), 0.0);
      g[2] = Vec3(inv(1, 0), inv(1, 1), 0.0);
      g[0] = -g[1] - g[2];
      g[3] = Vec3::Zero();
    } else {
      Mat3 t;
      t.col(0) = x[1] - x[0];
      t.col(1) = x[2] - x[0];
      t.col(2) = x[3] - x[0];
      const Mat3 inv = t.inverse();
      for (int i = 0; i < 3; ++i) g[i + 1] = inv.row(i).transpose();
      g[0] = -g[1] - g[2] - g[3];
    }
  }
  build_topology();
}

void Mesh::build_topology() {
  const int nv = dim_ + 1;
  const int ncells = num_cells();

  // Facets keyed by their sorted vertex tuple; std::map gives the required order.
  std::map<std::array<int, 3>, std::vector<std::pair<int, int>>> facet_map;
  for (int c = 0; c < ncells; ++c) {
    for (int i = 0; i < nv; ++i) {
      std::array<int, 3> key{-1, -1, -1};
      int k = 0;
      for (int j = 0; j < nv; ++j)
        if (j != i) key[k++] = cells_[c][j];
      std::sort(key.begin(), key.begin() + dim_);
      facet_map[key].emplace_back(c, i);
    }
  }

  cell_facets_.assign(ncells, {-1, -1, -1, -1});
  facets_.clear();
  facets_.reserve(facet_map.size());
  vertex_boundary_.assign(vertices_.size(), false);
  for (const auto& [key, owners] : facet_map) {
    if (owners.size() > 2) throw ConfigError("non-manifold facet in mesh");
    Facet f;
    f.vertices = key;
    auto sorted = owners;
    std::sort(sorted.begin(), sorted.end());
    f.cell_plus = sorted[0].first;
    f.local_plus = sorted[0].second;
    if (sorted.size() == 2) {
      f.cell_minus = sorted[1].first;
      f.local_minus = sorted[1].second;
    }
    const Vec3& x0 = vertices_[key[0]];
    const Vec3& x1 = vertices_[key[1]];
    Vec3 n;
    Vec3 fc;
    if (dim_ == 2) {
      const Vec3 t = x1 - x0;
      f.measure = t.norm();
      n = Vec3(t.y(), -t.x(), 0.0) / f.measure;
      fc = 0.5 * (x0 + x1);
    } else {
      const Vec3& x2 = vertices_[key[2]];
      const Vec3 cr = (x1 - x0).cross(x2 - x0);
      f.measure = 0.5 * cr.norm();
      n = cr.normalized();
      fc = (x0 + x1 + x2) / 3.0;
    }
    if (n.dot(fc - centroids_[f.cell_plus]) < 0.0) n = -n;
    f.normal = n;

    const int id = static_cast<int>(facets_.size());
    cell_facets_[f.cell_plus][f.local_plus] = id;
    if (f.cell_minus >= 0) cell_facets_[f.cell_minus][f.local_minus] = id;

    if (f.is_boundary()) {
      for (int k = 0; k < dim_; ++k) vertex_boundary_[key[k]] = true;
      for (int axis = 0; axis < dim_ && f.boundary_side < 0; ++axis) {
        const double tol = 1e-12 * (box_.upper[axis] - box_.lower[axis]);
        bool at_lower = true;
        bool at_upper = true;
        for (int k = 0; k < dim_; ++k) {
          const double xv = vertices_[key[k]][axis];
          at_lower = at_lower && std::abs(xv - box_.lower[axis]) <= tol;
          at_upper = at_upper && std::abs(xv - box_.upper[axis]) <= tol;
        }
        if (at_lower) f.boundary_side = 2 * axis;
        if (at_upper) f.boundary_side = 2 * axis + 1;
      }
    }
    facets_.push_back(f);
  }

  // Edges.
  cell_edges_.assign(ncells, {});
  edges_.clear();
  if (dim_ == 2) {
    // Every facet is an edge; keep the same numbering.
    for (const Facet& f : facets_) {
      Edge e;
      e.vertices = {f.vertices[0], f.vertices[1]};
      e.on_boundary = f.is_boundary();
      edges_.push_back(e);
    }
    for (int c = 0; c < ncells; ++c) {
      for (int i = 0; i < 3; ++i) {
        CellEdge ce;
        ce.edge = cell_facets_[c][i];
        int a = (i + 1) % 3;
        int b = (i + 2) % 3;
        if (cells_[c][a] > cells_[c][b]) std::swap(a, b);
        ce.local_a = a;
        ce.local_b = b;
        cell_edges_[c][i] = ce;
      }
    }
    return;
  }

  std::map<std::array<int, 2>, int> edge_map;
  for (int c = 0; c < ncells; ++c) {
    for (const auto& le : kTetEdges) {
      std::array<int, 2> key{cells_[c][le[0]], cells_[c][le[1]]};
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      edge_map.emplace(key, 0);
    }
  }
  int next = 0;
  for (auto& [key, id] : edge_map) {
    id = next++;
    Edge e;
    e.vertices = key;
    edges_.push_back(e);
  }
  for (int c = 0; c < ncells; ++c) {
    for (int k = 0; k < 6; ++k) {
      int a = kTetEdges[k][0];
      int b = kTetEdges[k][1];
      if (cells_[c][a] > cells_[c][b]) std::swap(a, b);
      CellEdge ce;
      ce.edge = edge_map.at({cells_[c][a], cells_[c][b]});
      ce.local_a = a;
      ce.local_b = b;
      cell_edges_[c][k] = ce;
    }
  }
  facet_edges_.assign(facets_.size(), {});
  for (std::size_t fi = 0; fi < facets_.size(); ++fi) {
    const Facet& f = facets_[fi];
    const auto& v = f.vertices;
    constexpr std::array<std::array<int, 3>, 3> loops{{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};
    for (int k = 0; k < 3; ++k) {
      const int p = v[loops[k][0]];
      const int q = v[loops[k][1]];
      const int r = v[loops[k][2]];
      const Vec3 orient = (vertices_[q] - vertices_[p]).cross(vertices_[r] - vertices_[p]);
      FacetEdge fe;
      fe.edge = edge_map.at({p, q});
      fe.sign = orient.dot(f.normal) > 0.0 ? 1.0 : -1.0;
      facet_edges_[fi][k] = fe;
      if (f.is_boundary()) edges_[fe.edge].on_boundary = true;
    }
  }
}

double Mesh::diameter(int c) const {
  double d = 0.0;
  const int nv = dim_ + 1;
  for (int i = 0; i < nv; ++i)
    for (int j = i + 1; j < nv; ++j)
      d = std::max(d, (vertices_[cells_[c][i]] - vertices_[cells_[c][j]]).norm());
  return d;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (int c = 0; c < num_cells(); ++c) h = std::max(h, diameter(c));
  return h;
}

Vec3 Mesh::point(int c, const Bary& lam) const {
  Vec3 x = Vec3::Zero();
  for (int i = 0; i <= dim_; ++i) x += lam[i] * vertices_[cells_[c][i]];
  return x;
}

double Mesh::facet_orientation(int c, int local) const {
  const Facet& f = facets_[cell_facets_[c][local]];
  return f.cell_plus == c ? 1.0 : -1.0;
}

std::span<const FacetEdge> Mesh::facet_edges(int f) const {
  if (dim_ != 3) throw UnsupportedDimension("facet_edges is only defined for 3D meshes");
  return {facet_edges_[f].data(), 3};
}

Bary Mesh::facet_point_in_cell(int f, int c, const Bary& facet_lam) const {
  Bary lam = Bary::Zero();
  const Facet& fa = facets_[f];
  for (int k = 0; k < dim_; ++k) {
    const int gv = fa.vertices[k];
    int local = -1;
    for (int i = 0; i <= dim_; ++i)
      if (cells_[c][i] == gv) local = i;
    if (local < 0) throw UsageError("facet does not belong to cell");
    lam[local] = facet_lam[k];
  }
  return lam;
}

Mesh build_structured_mesh(int dim, std::span<const int> divisions, const Box& bounds) {
  if (dim != 2 && dim != 3) throw ConfigError("mesh dimension must be 2 or 3");
  if (static_cast<int>(divisions.size()) < dim)
    throw ConfigError("need one division count per axis");
  std::array<int, 3> n{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    if (divisions[a] < 1) throw ConfigError("mesh divisions must be >= 1 on every axis");
    if (!(bounds.upper[a] > bounds.lower[a]))
      throw ConfigError("degenerate box bounds on axis " + std::to_string(a));
    n[a] = divisions[a];
  }
  Box box = bounds;
  if (dim == 2) {
    box.lower.z() = 0.0;
    box.upper.z() = 0.0;
  }
  const int nz = dim == 3 ? n[2] : 0;
  auto vid = [&](int i, int j, int k) { return i + (n[0] + 1) * (j + (n[1] + 1) * k); };
  std::vector<Vec3> verts;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= n[1]; ++j)
      for (int i = 0; i <= n[0]; ++i) {
        Vec3 x = Vec3::Zero();
        const std::array<int, 3> idx{i, j, k};
        for (int a = 0; a < dim; ++a)
          x[a] = idx[a] == n[a] ? box.upper[a]
                                : box.lower[a] + (box.upper[a] - box.lower[a]) * idx[a] / n[a];
        verts.push_back(x);
      }

  std::vector<std::array<int, 4>> cells;
  if (dim == 2) {
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const int v00 = vid(i, j, 0), v10 = vid(i + 1, j, 0);
        const int v01 = vid(i, j + 1, 0), v11 = vid(i + 1, j + 1, 0);
        cells.push_back({v00, v10, v11, -1});
        cells.push_back({v00, v11, v01, -1});
      }
  } else {
    constexpr std::array<std::array<int, 3>, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (int k = 0; k < n[2]; ++k)
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i)
          for (const auto& p : perms) {
            std::array<int, 3> cur{i, j, k};
            std::array<int, 4> tet{};
            tet[0] = vid(cur[0], cur[1], cur[2]);
            for (int s = 0; s < 3; ++s) {
              cur[p[s]] += 1;
              tet[s + 1] = vid(cur[0], cur[1], cur[2]);
            }
            cells.push_back(tet);
          }
  }
  return Mesh(dim, std::move(verts), std::move(cells), box);
}

std::vector<InteriorFacet> interior_facets(const Mesh& mesh) {
  std::vector<InteriorFacet> out;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fa = mesh.facet(f);
    if (fa.is_boundary()) continue;
    out.push_back({f, fa.cell_plus, fa.cell_minus, fa.normal, fa.measure});
  }
  return out;
}

}  // namespace mhdfem
