#include "mhdfem/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include "mhdfem/output.hpp"
#include "mhdfem/scenarios.hpp"
#include "mhdfem/stepper.hpp"

namespace mhdfem {

int step_count(double dt, double t_end) {
  if (!(dt > 0.0)) throw ConfigError("time step dt must be > 0");
  if (t_end <= 0.0) return 0;
  return static_cast<int>(std::ceil(t_end / dt - 1e-9));
}

namespace {

class SnapshotWriter {
 public:
  SnapshotWriter(const SimConfig& cfg, bool enabled) : cfg_(cfg) {
    enabled_ = enabled && cfg.output.vtk && cfg.output.snapshot_interval > 0.0;
    if (!enabled_) return;
    const auto path = std::filesystem::path(cfg.output.directory) / "snapshots.csv";
    index_.open(path);
    if (!index_) throw IoError("cannot open '" + path.string() + "'");
    index_ << "index,t,file\n";
  }

  void maybe_write(const State& st, RunResult& result) {
    if (!enabled_) return;
    const double eps = 1e-9 * cfg_.output.snapshot_interval;
    if (st.t + eps < next_) return;
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%05d.vtk", count_);
    const auto path = std::filesystem::path(cfg_.output.directory) / name;
    write_vtk_snapshot(st, cfg_.physics, path);
    char t[40];
    std::snprintf(t, sizeof t, "%.17g", st.t);
    index_ << count_ << ',' << t << ',' << name << '\n';
    index_.flush();
    result.snapshots.push_back(path);
    ++count_;
    while (next_ <= st.t + eps) next_ += cfg_.output.snapshot_interval;
  }

 private:
  const SimConfig& cfg_;
  bool enabled_ = false;
  std::ofstream index_;
  double next_ = 0.0;
  int count_ = 0;
};

}  // namespace

RunResult run_simulation(const SimConfig& cfg, const RunOptions& options) {
  for (const auto& w : cfg.validate())
    if (options.log) *options.log << "warning: " << w << '\n';
  Problem problem = make_problem(cfg);
  const int nsteps = step_count(cfg.time.dt, cfg.time.t_end);

  std::unique_ptr<CsvWriter> csv;
  if (options.write_files) {
    const std::filesystem::path dir(cfg.output.directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    std::ofstream(dir / "config.toml") << serialize_config(cfg);
    csv = std::make_unique<CsvWriter>(dir / "diagnostics.csv");
  }
  SnapshotWriter snapshots(cfg, options.write_files);

  Stepper stepper(problem.spaces, cfg.physics, cfg.solver);
  if (cfg.output.debug_checks) stepper.enable_debug_checks(1e3 * cfg.solver.abs_tol);
  const DiagnosticsEngine diag(problem.spaces, cfg.physics);

  RunResult result;
  State state = std::move(problem.state);
  result.records.push_back(diag.record(state));
  if (csv) csv->append(result.records.back());
  snapshots.maybe_write(state, result);

  for (int k = 0; k < nsteps; ++k) {
    const double t1 = k + 1 == nsteps ? cfg.time.t_end : (k + 1) * cfg.time.dt;
    const double dt = t1 - state.t;
    StepReport rep;
    try {
      rep = stepper.step(state, dt);
    } catch (const SolverError& e) {
      result.exit_code = kExitNewtonFailure;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", state.t);
      result.message = "Newton failure in step " + std::to_string(k + 1) + " at t=" + buf + ": " + e.what();
      if (options.log) *options.log << result.message << '\n';
      break;
    }
    rep.state.t = t1;
    const bool helicity = (k + 1) % cfg.output.helicity_interval == 0;
    result.records.push_back(diag.record(state, rep.state, dt, rep.newton_iterations, helicity));
    state = std::move(rep.state);
    ++result.steps;
    if (csv) csv->append(result.records.back());
    snapshots.maybe_write(state, result);
    if (options.on_step) options.on_step(state, result.records.back());
    if (options.log) {
      const auto& r = result.records.back();
      char line[160];
      std::snprintf(line, sizeof line, "step %d t=%.6g newton=%d energy=%.12g residual=%.3g\n", k + 1, state.t,
                    r.newton_iters, r.energy, r.energy_residual);
      *options.log << line << std::flush;
    }
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace mhdfem
