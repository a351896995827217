#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mhdfem/config.hpp"
#include "mhdfem/diagnostics.hpp"
#include "mhdfem/state.hpp"

namespace mhdfem {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNewtonFailure = 2;
inline constexpr int kExitConfigError = 3;

struct RunOptions {
  bool write_files = true;
  std::ostream* log = nullptr;
  /// Called after every accepted step with the new state and its record.
  std::function<void(const State&, const DiagnosticsRecord&)> on_step;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  int steps = 0;
  std::vector<DiagnosticsRecord> records;  // initial record plus one per step
  State final_state;
  std::vector<std::filesystem::path> snapshots;
};

/// Number of steps covering [0, t_end]; the last one is shortened to land on t_end.
[[nodiscard]] int step_count(double dt, double t_end);

/// Runs a configuration. Files (when enabled) go to the output directory:
/// config.toml, diagnostics.csv, snapshot_NNNNN.vtk and snapshots.csv.
/// Throws ConfigError for invalid input; a Newton failure ends the run early with
/// exit code 2 and the rows computed so far.
[[nodiscard]] RunResult run_simulation(const SimConfig& cfg, const RunOptions& options = {});

}  // namespace mhdfem
