#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "helpers.hpp"
#include "mhdfem/output.hpp"
#include "mhdfem/scenarios.hpp"
#include "mhdfem/simulation.hpp"

using namespace mhdfem;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "mhdfem_app_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SimConfig small_rt(int steps) {
  SimConfig c = scenario_rayleigh_taylor(0.4, 8);
  c.time.t_end = steps * c.time.dt;
  c.output.snapshot_interval = 0.0;
  return c;
}

}  // namespace

TEST(Scenarios, RayleighTaylorProfiles) {
  EXPECT_NEAR(rt_pressure(0.5), 2.0, 1e-15);
  EXPECT_NEAR(rt_density(5.0), 1.0, 1e-12);
  EXPECT_NEAR(rt_density(-5.0), 2.0, 1e-12);
  EXPECT_NEAR(rt_density(0.5), 1.5, 1e-15);
  const SimConfig c = scenario_rayleigh_taylor(0.4, 1);
  EXPECT_EQ(c.physics.variant, Variant::FullEntropy);
  EXPECT_EQ(c.mesh.divisions[0], 32);
  EXPECT_EQ(c.mesh.divisions[1], 128);
  EXPECT_EQ(c.physics.background, Vec3(0.4, 0, 0));
  EXPECT_EQ(c.physics.mu, 0.01);
  EXPECT_EQ(c.physics.nu, 0.01);
  EXPECT_EQ(c.physics.potential_gradient, Vec3(0, -1, 0));
  EXPECT_EQ(c.time.dt, 0.005);
  const Mesh m = build_mesh(c.mesh);
  EXPECT_NEAR(m.box().upper.x() / c.mesh.divisions[0], 1.0 / 128.0, 1e-15);
  // The entropy profile reproduces the pressure through the ideal-gas law p = (gamma-1) eps.
  const EquationOfState& eos = c.physics.eos;
  for (double y : {0.1, 0.45, 0.5, 0.8}) {
    const double rho = rt_density(y);
    EXPECT_NEAR((eos.gamma - 1.0) * eos.energy(rho, rt_entropy(y, eos)), rt_pressure(y), 1e-12);
  }
  const SimConfig coarse = scenario_rayleigh_taylor(0.8, 8);
  EXPECT_EQ(coarse.mesh.divisions[0], 4);
  EXPECT_EQ(coarse.mesh.divisions[1], 16);
}

TEST(Scenarios, InvariantProblemData) {
  const SimConfig c = scenario_invariants3d(1);
  EXPECT_EQ(c.physics.variant, Variant::BarotropicInviscid);
  EXPECT_NEAR(build_mesh(c.mesh).max_diameter(), std::sqrt(3.0) / 2.0, 1e-14);
  for (double t : {-0.7, 0.1, 0.55}) {
    for (double s : {-0.3, 0.9}) {
      EXPECT_NEAR(invariants3d_velocity(Vec3(1, t, s)).x(), 0.0, 1e-15);
      EXPECT_NEAR(invariants3d_velocity(Vec3(t, -1, s)).y(), 0.0, 1e-15);
      EXPECT_NEAR(invariants3d_velocity(Vec3(t, s, 1)).z(), 0.0, 1e-15);
    }
  }
  EXPECT_NEAR(invariants3d_density(Vec3(0.5, 0.5, 0.5)), 3.0, 1e-15);
  const Problem p = make_problem(c);
  EXPECT_LE(cell_divergence(p.state.b).lpNorm<Eigen::Infinity>(), 1e-13);
  EXPECT_GT(p.state.b.coeffs().norm(), 1e-3);
}

TEST(Scenarios, InterfaceAmplitude) {
  const Problem p = make_problem(scenario_rayleigh_taylor(0.4, 8));
  EXPECT_LE(interface_amplitude(p.state.rho), 1e-13);
  FeFunction bumped = p.state.rho;
  bumped.coeffs()[0] += 0.1;
  EXPECT_GT(interface_amplitude(bumped), 1e-3);
  EXPECT_NEAR(p.state.b.coeffs().norm(), 0.0, 0.0);
}

TEST(Csv, RoundTripIsBitExact) {
  mhdfem::testkit::Rng rng(1);
  std::vector<DiagnosticsRecord> rows;
  for (int i = 0; i < 5; ++i)
    rows.push_back({rng.uniform(), rng.uniform() * 1e-300, rng.uniform() * 1e300, rng.uniform(),
                    i == 2 ? std::numeric_limits<double>::quiet_NaN() : rng.uniform(), 1.0 / 3.0, -0.0, i});
  const fs::path f = scratch("csv") / "d.csv";
  write_diagnostics_csv(rows, f);
  const std::string text = slurp(f);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  const auto back = read_diagnostics_csv(f);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].t, rows[i].t);
    EXPECT_EQ(back[i].mass, rows[i].mass);
    EXPECT_EQ(back[i].energy, rows[i].energy);
    EXPECT_EQ(back[i].div_b_l2, rows[i].div_b_l2);
    EXPECT_EQ(back[i].newton_iters, rows[i].newton_iters);
    if (i == 2)
      EXPECT_TRUE(std::isnan(back[i].magnetic_helicity));
    else
      EXPECT_EQ(back[i].magnetic_helicity, rows[i].magnetic_helicity);
  }
}

TEST(Csv, ErrorsNameTheFile) {
  const fs::path dir = scratch("csv_err");
  std::ofstream(dir / "bad.csv") << "t,mass\n1,2\n";
  try {
    (void)read_diagnostics_csv(dir / "bad.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv"), std::string::npos);
  }
  std::ofstream(dir / "row.csv") << kCsvHeader << "\n1,2,3\n";
  EXPECT_THROW((void)read_diagnostics_csv(dir / "row.csv"), IoError);
  EXPECT_THROW((void)read_diagnostics_csv(dir / "none.csv"), IoError);
  std::ofstream(dir / "plain") << "x";
  EXPECT_THROW(write_diagnostics_csv({}, dir / "plain" / "x.csv"), IoError);
}

TEST(Vtk, CellCountAndFields) {
  for (const SimConfig& c : {small_rt(1), scenario_invariants3d(4)}) {
    const Problem p = make_problem(c);
    const fs::path f = scratch("vtk") / "s.vtk";
    write_vtk_snapshot(p.state, c.physics, f);
    const std::string text = slurp(f);
    std::ostringstream cells, data;
    cells << "CELLS " << p.mesh->num_cells() << ' ';
    data << "CELL_DATA " << p.mesh->num_cells();
    EXPECT_NE(text.find(cells.str()), std::string::npos);
    EXPECT_NE(text.find(data.str()), std::string::npos);
    EXPECT_NE(text.find("SCALARS rho double"), std::string::npos);
    EXPECT_NE(text.find("VECTORS B_total double"), std::string::npos);
    EXPECT_EQ(text.find("SCALARS s double") != std::string::npos, c.physics.has_entropy());
  }
}

TEST(Run, ZeroLengthRunHasOneRecord) {
  SimConfig c = scenario_invariants3d(4);
  c.time.t_end = 0.0;
  c.output.directory = scratch("zero").string();
  const RunResult r = run_simulation(c);
  EXPECT_EQ(r.exit_code, kExitOk);
  ASSERT_EQ(r.records.size(), 1u);
  const auto csv = read_diagnostics_csv(fs::path(c.output.directory) / "diagnostics.csv");
  EXPECT_EQ(csv.size(), 1u);
  EXPECT_TRUE(parse_config(fs::path(c.output.directory) / "config.toml") == c);
}

TEST(Run, StepCountLandsOnEndTime) {
  EXPECT_EQ(step_count(0.005, 1.0), 200);
  EXPECT_EQ(step_count(0.1, 0.25), 3);
  EXPECT_EQ(step_count(0.1, 0.0), 0);
  SimConfig c = scenario_invariants3d(4);
  c.time.t_end = 0.25;
  c.time.dt = 0.1;
  c.output.directory = scratch("land").string();
  const RunResult r = run_simulation(c);
  ASSERT_EQ(r.records.size(), 4u);
  EXPECT_DOUBLE_EQ(r.records.back().t, 0.25);
}

TEST(Run, TenStepsGiveElevenMonotoneRecords) {
  SimConfig c = scenario_invariants3d(4);
  c.time.t_end = 10 * c.time.dt;
  c.output.directory = scratch("ten").string();
  c.output.snapshot_interval = 2 * c.time.dt;
  const RunResult r = run_simulation(c);
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  ASSERT_EQ(r.records.size(), 11u);
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    EXPECT_GT(r.records[i].t, r.records[i - 1].t);
    EXPECT_GT(r.records[i].newton_iters, 0);
    EXPECT_NEAR(r.records[i].mass, r.records[0].mass, 1e-12 * r.records[0].mass);
  }
  EXPECT_EQ(read_diagnostics_csv(fs::path(c.output.directory) / "diagnostics.csv").size(), 11u);
  EXPECT_EQ(r.snapshots.size(), 6u);
  for (const fs::path& s : r.snapshots) EXPECT_TRUE(fs::exists(s)) << s;
  EXPECT_TRUE(fs::exists(fs::path(c.output.directory) / "snapshots.csv"));
}

TEST(Run, ViscousRayleighTaylorEnergyDecreases) {
  SimConfig c = small_rt(20);
  const RunResult r = run_simulation(c, RunOptions{false, nullptr, nullptr});
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  ASSERT_EQ(r.records.size(), 21u);
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    EXPECT_LE(r.records[i].energy, r.records[i - 1].energy + 1e3 * c.solver.abs_tol) << i;
    EXPECT_LE(std::abs(r.records[i].energy_residual), 1e3 * c.solver.abs_tol) << i;
    EXPECT_TRUE(std::isnan(r.records[i].magnetic_helicity));
  }
  EXPECT_LT(r.records.back().energy, r.records.front().energy);
}

TEST(Run, DeterministicOutput) {
  std::string first;
  for (int k = 0; k < 2; ++k) {
    SimConfig c = small_rt(5);
    c.output.directory = scratch("det" + std::to_string(k)).string();
    ASSERT_EQ(run_simulation(c).exit_code, kExitOk);
    const std::string csv = slurp(fs::path(c.output.directory) / "diagnostics.csv");
    if (k == 0)
      first = csv;
    else
      EXPECT_EQ(csv, first);
  }
}

TEST(Run, NewtonFailureStopsWithPartialRecords) {
  SimConfig c = small_rt(3);
  c.solver.max_iter = 1;
  c.solver.abs_tol = 1e-15;
  c.solver.rel_tol = 1e-30;
  const RunResult r = run_simulation(c, RunOptions{false, nullptr, nullptr});
  EXPECT_EQ(r.exit_code, kExitNewtonFailure);
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_FALSE(r.message.empty());
}

TEST(Run, InvalidConfigThrows) {
  SimConfig c = small_rt(1);
  c.time.dt = -1.0;
  EXPECT_THROW((void)run_simulation(c, RunOptions{false, nullptr, nullptr}), ConfigError);
}

#ifdef MHDFEM_CLI
TEST(Cli, RunIsByteDeterministic) {
  const fs::path dir = scratch("cli");
  SimConfig c = small_rt(4);
  for (const char* sub : {"a", "b"}) {
    c.output.directory = (dir / sub).string();
    std::ofstream(dir / (std::string(sub) + ".toml")) << serialize_config(c);
    const std::string cmd =
        std::string(MHDFEM_CLI) + " run -q " + (dir / (std::string(sub) + ".toml")).string() + " > /dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0) << cmd;
  }
  EXPECT_EQ(slurp(dir / "a" / "diagnostics.csv"), slurp(dir / "b" / "diagnostics.csv"));
}
#endif
