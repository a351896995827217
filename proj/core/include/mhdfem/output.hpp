#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "mhdfem/diagnostics.hpp"
#include "mhdfem/physics.hpp"
#include "mhdfem/state.hpp"

namespace mhdfem {

inline constexpr const char* kCsvHeader =
    "t,mass,energy,cross_helicity,magnetic_helicity,div_b_l2,energy_residual,newton_iters";

[[nodiscard]] std::string format_csv_row(const DiagnosticsRecord& r);

/// Appends rows as they arrive and flushes each one, so an aborted run leaves a valid prefix.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void append(const DiagnosticsRecord& r);

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
};

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& series, const std::filesystem::path& path);
[[nodiscard]] std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path);

/// Legacy ASCII unstructured grid: cell data rho, s (entropy runs) and cell-average
/// vectors u and B_total; also point data u for CG1 velocities.
void write_vtk_snapshot(const State& state, const Physics& physics, const std::filesystem::path& path);

}  // namespace mhdfem
