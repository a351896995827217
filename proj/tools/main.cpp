#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mhdfem/config.hpp"
#include "mhdfem/scenarios.hpp"
#include "mhdfem/selfcheck.hpp"
#include "mhdfem/simulation.hpp"

using namespace mhdfem;

namespace {

struct Overrides {
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::string> out;
  bool no_upwind = false;
  bool quiet = false;
  bool print_config = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--dt", dt, "time step");
    cmd->add_option("--t-end", t_end, "final time");
    cmd->add_option("--out", out, "output directory");
    cmd->add_flag("--no-upwind", no_upwind, "disable upwinding of the advection forms");
    cmd->add_flag("-q,--quiet", quiet, "no per-step log");
    cmd->add_flag("--print-config", print_config, "print the resolved configuration and exit");
  }

  void apply(SimConfig& cfg) const {
    if (dt) cfg.time.dt = *dt;
    if (t_end) cfg.time.t_end = *t_end;
    if (out) cfg.output.directory = *out;
    if (no_upwind) cfg.physics.upwind.enabled = false;
  }
};

int execute(SimConfig cfg, const Overrides& ov) {
  ov.apply(cfg);
  (void)cfg.validate();
  if (ov.print_config) {
    std::cout << serialize_config(cfg);
    return kExitOk;
  }
  RunOptions opts;
  opts.log = ov.quiet ? nullptr : &std::cerr;
  const RunResult res = run_simulation(cfg, opts);
  if (res.exit_code != kExitOk) {
    std::cerr << "error: " << res.message << '\n';
    return res.exit_code;
  }
  std::cerr << "completed " << res.steps << " steps; output in " << cfg.output.directory << '\n';
  return kExitOk;
}

int run_check() {
  bool ok = true;
  for (const CheckResult& r : run_lemma_suite()) {
    std::printf("%s  %-52s worst=%.3e tol=%.1e trials=%d\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.worst,
                r.tolerance, r.trials);
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving finite element solver for compressible MHD"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides run_ov;
  auto* run = app.add_subcommand("run", "run a TOML configuration");
  run->add_option("config", config_path, "configuration file")->required();
  run_ov.attach(run);

  auto* scenario = app.add_subcommand("scenario", "run a preset experiment");
  scenario->require_subcommand(1);
  int factor_3d = 1;
  Overrides ov_3d;
  auto* inv = scenario->add_subcommand("invariants3d", "3D conservation test on [-1,1]^3");
  inv->add_option("--factor", factor_3d, "mesh coarsening factor")->check(CLI::PositiveNumber);
  ov_3d.attach(inv);

  double b0 = 0.0;
  int factor_rt = 1;
  Overrides ov_rt;
  auto* rt = scenario->add_subcommand("rt", "magnetic Rayleigh-Taylor instability");
  rt->add_option("--b0", b0, "background field strength")->required()->check(CLI::NonNegativeNumber);
  rt->add_option("--factor", factor_rt, "mesh coarsening factor")->check(CLI::PositiveNumber);
  ov_rt.attach(rt);

  app.add_subcommand("check", "run the form identities on tiny meshes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*run) return execute(parse_config(config_path), run_ov);
    if (*inv) return execute(scenario_invariants3d(factor_3d), ov_3d);
    if (*rt) return execute(scenario_rayleigh_taylor(b0, factor_rt), ov_rt);
    return run_check();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
