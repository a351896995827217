#include "mhdfem/output.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mhdfem/quadrature.hpp"

namespace mhdfem {

namespace {

std::string io_message(const std::filesystem::path& path, const std::string& what) {
  std::string msg = what + " '" + path.string() + "'";
  if (errno != 0) msg += ": " + std::string(std::strerror(errno));
  return msg;
}

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void ensure_parent(const std::filesystem::path& path) {
  const auto dir = path.parent_path();
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

// Average of a function over a cell with the cell quadrature rule.
Vec3 cell_average(const FeFunction& f, int c) {
  const QuadratureRule& q = cell_rule(f.space().mesh().dim());
  Vec3 s = Vec3::Zero();
  for (int p = 0; p < q.size(); ++p) s += q.weights[p] * f.evaluate(c, q.points[p]);
  return s;
}

}  // namespace

std::string format_csv_row(const DiagnosticsRecord& r) {
  std::string s;
  for (double v : {r.t, r.mass, r.energy, r.cross_helicity, r.magnetic_helicity, r.div_b_l2, r.energy_residual}) {
    put(s, v);
    s += ',';
  }
  s += std::to_string(r.newton_iters);
  return s;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path) {
  ensure_parent(path);
  errno = 0;
  file_ = std::fopen(path.string().c_str(), "w");
  if (!file_) throw IoError(io_message(path, "cannot open diagnostics file"));
  if (std::fprintf(file_, "%s\n", kCsvHeader) < 0 || std::fflush(file_) != 0)
    throw IoError(io_message(path, "cannot write"));
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::append(const DiagnosticsRecord& r) {
  errno = 0;
  if (std::fprintf(file_, "%s\n", format_csv_row(r).c_str()) < 0 || std::fflush(file_) != 0)
    throw IoError(io_message(path_, "cannot write"));
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& series, const std::filesystem::path& path) {
  CsvWriter w(path);
  for (const auto& r : series) w.append(r);
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open diagnostics file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw IoError("'" + path.string() + "' does not start with the diagnostics header");
  std::vector<DiagnosticsRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8)
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 8 columns");
    double v[8];
    for (int i = 0; i < 8; ++i) {
      char* end = nullptr;
      v[i] = std::strtod(cells[i].c_str(), &end);
      if (cells[i].empty() || *end != '\0')
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
    }
    DiagnosticsRecord r;
    r.t = v[0];
    r.mass = v[1];
    r.energy = v[2];
    r.cross_helicity = v[3];
    r.magnetic_helicity = v[4];
    r.div_b_l2 = v[5];
    r.energy_residual = v[6];
    r.newton_iters = static_cast<int>(v[7]);
    out.push_back(r);
  }
  return out;
}

void write_vtk_snapshot(const State& state, const Physics& physics, const std::filesystem::path& path) {
  const Mesh& m = state.rho.space().mesh();
  const int nv = m.vertices_per_cell();
  std::string out;
  out.reserve(static_cast<std::size_t>(m.num_cells()) * 200);
  auto vec = [&out](const Vec3& v) {
    put(out, v.x());
    out += ' ';
    put(out, v.y());
    out += ' ';
    put(out, v.z());
    out += '\n';
  };
  out += "# vtk DataFile Version 3.0\nmhdfem t=";
  put(out, state.t);
  out += "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(m.num_vertices()) + " double\n";
  for (int v = 0; v < m.num_vertices(); ++v) {
    Vec3 x = m.vertex(v);
    if (m.dim() == 2) x.z() = 0.0;
    vec(x);
  }
  out += "CELLS " + std::to_string(m.num_cells()) + " " + std::to_string(m.num_cells() * (nv + 1)) + "\n";
  for (int c = 0; c < m.num_cells(); ++c) {
    out += std::to_string(nv);
    for (int i = 0; i < nv; ++i) out += " " + std::to_string(m.cell(c)[i]);
    out += '\n';
  }
  out += "CELL_TYPES " + std::to_string(m.num_cells()) + "\n";
  const std::string type = m.dim() == 2 ? "5\n" : "10\n";
  for (int c = 0; c < m.num_cells(); ++c) out += type;

  out += "CELL_DATA " + std::to_string(m.num_cells()) + "\n";
  out += "SCALARS rho double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < m.num_cells(); ++c) {
    put(out, state.rho.coeffs()[c]);
    out += '\n';
  }
  if (state.s.valid()) {
    out += "SCALARS s double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < m.num_cells(); ++c) {
      put(out, state.s.coeffs()[c]);
      out += '\n';
    }
  }
  out += "VECTORS u double\n";
  for (int c = 0; c < m.num_cells(); ++c) vec(cell_average(state.u, c));
  out += "VECTORS B_total double\n";
  for (int c = 0; c < m.num_cells(); ++c) vec(cell_average(state.b, c) + physics.background);

  if (state.u.space().family() == Family::Cg1Vector) {
    // CG1 dofs: 3 components per interior vertex; boundary vertices carry zero.
    out += "POINT_DATA " + std::to_string(m.num_vertices()) + "\nVECTORS u_nodal double\n";
    std::vector<Vec3> nodal(m.num_vertices(), Vec3::Zero());
    for (int c = 0; c < m.num_cells(); ++c)
      for (int i = 0; i < nv; ++i) {
        Bary lam = Bary::Zero();
        lam[i] = 1.0;
        nodal[m.cell(c)[i]] = state.u.evaluate(c, lam);
      }
    for (const Vec3& v : nodal) vec(v);
  }

  ensure_parent(path);
  errno = 0;
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError(io_message(path, "cannot open snapshot file"));
  const bool ok = std::fwrite(out.data(), 1, out.size(), f) == out.size();
  const bool closed = std::fclose(f) == 0;
  if (!ok || !closed) throw IoError(io_message(path, "cannot write snapshot"));
}

}  // namespace mhdfem
