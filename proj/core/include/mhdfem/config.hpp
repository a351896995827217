#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "mhdfem/mesh.hpp"
#include "mhdfem/physics.hpp"
#include "mhdfem/sparse.hpp"

namespace mhdfem {

struct MeshSpec {
  int dim = 3;
  std::array<int, 3> divisions{4, 4, 4};
  Vec3 lower{-1.0, -1.0, -1.0};
  Vec3 upper{1.0, 1.0, 1.0};
};

struct TimeSpec {
  double dt = 0.005;
  double t_end = 1.0;
};

struct OutputSpec {
  std::string directory = "output";
  double snapshot_interval = 0.1;  // <= 0 disables snapshots
  bool vtk = true;
  int helicity_interval = 1;  // magnetic helicity every n-th record (3D only)
  bool debug_checks = false;
};

/// Initial data: `invariants3d`, `rayleigh_taylor` (uses the background field and eos)
/// or `rest` (uniform density, zero velocity and field fluctuation).
struct InitialSpec {
  std::string kind = "rest";
  double density = 1.0;
};

struct SimConfig {
  MeshSpec mesh;
  Physics physics;
  TimeSpec time;
  NewtonSettings solver;
  OutputSpec output;
  InitialSpec initial;

  /// Throws ConfigError; returns warnings that do not stop a run.
  std::vector<std::string> validate() const;

  bool operator==(const SimConfig& other) const;
};

[[nodiscard]] SimConfig parse_config_string(const std::string& text);
[[nodiscard]] SimConfig parse_config(const std::filesystem::path& path);

/// TOML text that parses back to an equal configuration.
[[nodiscard]] std::string serialize_config(const SimConfig& cfg);

[[nodiscard]] Mesh build_mesh(const MeshSpec& spec);

}  // namespace mhdfem
