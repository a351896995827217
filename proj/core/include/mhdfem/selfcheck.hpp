#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mhdfem {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest violation seen
  double tolerance = 0.0;
  int trials = 0;
};

/// Randomized algebraic identities of the discrete forms on tiny meshes (2 triangles,
/// the 6 Kuhn tetrahedra, and their 2-per-axis refinements where zero-trace CG1
/// functions need an interior vertex).
[[nodiscard]] std::vector<CheckResult> run_lemma_suite(std::uint64_t seed = 20240521, int trials = 100);

}  // namespace mhdfem
