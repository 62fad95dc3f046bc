// smib: transient-stability simulation and verification for a
// single-machine-infinite-bus system with battery angle-feedback control.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "smib/commands.hpp"
#include "smib/config.hpp"

namespace {

void add_overrides(CLI::App* cmd, smib::RunOverrides& o) {
  cmd->add_option("--dt", o.dt, "integration step (s)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", o.horizon, "simulation length (s)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stride", o.stride, "record every n-th step")
      ->check(CLI::PositiveNumber);
}

// Plant used by the eac / invariant-set subcommands: either a scenario file's
// plant section or the explicit operating-point flags.
struct PlantFlags {
  std::string scenario;
  double H = 4.0;
  double f0 = 50.0;
  double D = 0.0;
  double p_mech = 0.8;
  double p_max = 1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--scenario", scenario, "take the plant from this file");
    cmd->add_option("--H", H, "inertia constant (s)")->capture_default_str();
    cmd->add_option("--f0", f0, "nominal frequency (Hz)")->capture_default_str();
    cmd->add_option("--D", D, "damping")->capture_default_str();
    cmd->add_option("--p-mech", p_mech, "mechanical power (p.u.)")->capture_default_str();
    cmd->add_option("--p-max", p_max, "maximum transfer (p.u.)")->capture_default_str();
  }

  smib::SmibParams params() const {
    if (!scenario.empty()) return smib::load_scenario(scenario).plant;
    try {
      return smib::SmibParams::from_operating_point(H, f0, D, p_mech, p_max);
    } catch (const std::invalid_argument& e) {
      throw smib::ConfigError(e.what());
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SMIB transient stability with saturated battery angle feedback"};
  app.require_subcommand(1);

  std::string path;
  std::string out_dir = "out";
  smib::RunOverrides overrides;
  unsigned jobs = 0;

  auto* simulate = app.add_subcommand("simulate", "run one scenario");
  simulate->add_option("scenario", path, "scenario file")->required();
  simulate->add_option("--out", out_dir, "output directory")->capture_default_str();
  add_overrides(simulate, overrides);

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("sweep", path, "sweep file")->required();
  sweep->add_option("--out", out_dir, "output directory")->capture_default_str();
  sweep->add_option("--jobs", jobs, "worker threads (0 = all cores)")->capture_default_str();
  add_overrides(sweep, overrides);

  auto* verify = app.add_subcommand("verify", "numerical stability checks");
  verify->add_option("scenario", path, "scenario file")->required();
  add_overrides(verify, overrides);

  double delta0 = 0.0;
  PlantFlags eac_plant;
  auto* eac = app.add_subcommand("eac", "equal-area margin for an initial angle");
  eac->add_option("--delta0", delta0, "post-fault initial angle (rad)")
      ->required();
  eac_plant.add(eac);

  double delta_tilde = 0.0;
  double delta_tilde_dot = 0.0;
  std::optional<double> level;
  PlantFlags omega_plant;
  auto* omega = app.add_subcommand("invariant-set",
                                   "c_max and membership of a state in Omega");
  omega->add_option("--delta-tilde", delta_tilde, "angle deviation (rad)")->capture_default_str();
  omega->add_option("--delta-tilde-dot", delta_tilde_dot,
                    "angle deviation rate (rad/s)")->capture_default_str();
  omega->add_option("--c", level, "level value (default 0.99 c_max)");
  omega_plant.add(omega);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? smib::kExitOk : smib::kExitConfig;
  }

  try {
    if (*simulate) {
      return smib::cmd_simulate(path, out_dir, overrides, std::cout, std::cerr);
    }
    if (*sweep) {
      return smib::cmd_sweep(path, out_dir, overrides, jobs, std::cout,
                             std::cerr);
    }
    if (*verify) {
      return smib::cmd_verify(path, overrides, std::cout, std::cerr);
    }
    if (*eac) return smib::cmd_eac(delta0, eac_plant.params(), std::cout);
    if (*omega) {
      return smib::cmd_invariant_set({delta_tilde_dot, delta_tilde}, level,
                                     omega_plant.params(), std::cout,
                                     std::cerr);
    }
  } catch (const smib::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return smib::kExitConfig;
  }
  return smib::kExitOk;
}
