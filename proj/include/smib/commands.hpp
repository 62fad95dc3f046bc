#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "smib/config.hpp"

namespace smib {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitDivergence = 2,
  kExitVerification = 3,
};

/// Command-line overrides applied on top of a loaded scenario.
struct RunOverrides {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<int> stride;

  void apply(ScenarioFile& scenario) const;
};

/// Writes trajectory.csv, report.yaml, scenario.yaml (echo) and, when
/// requested, angle_deviation.svg / battery_power.svg into `out_dir`.
int cmd_simulate(const std::filesystem::path& scenario_path,
                 const std::filesystem::path& out_dir,
                 const RunOverrides& overrides, std::ostream& log,
                 std::ostream& err);

/// Runs every grid point on a pool of `jobs` workers (0 picks the hardware
/// concurrency). Each point writes into point_NNN/; the coordinator writes
/// summary.csv once all points have finished.
int cmd_sweep(const std::filesystem::path& sweep_path,
              const std::filesystem::path& out_dir,
              const RunOverrides& overrides, unsigned jobs, std::ostream& log,
              std::ostream& err);

/// Prints a pass/fail table; kExitVerification if any check fails.
int cmd_verify(const std::filesystem::path& scenario_path,
               const RunOverrides& overrides, std::ostream& out,
               std::ostream& err);

int cmd_eac(double delta0, const SmibParams& params, std::ostream& out);

int cmd_invariant_set(const PlantState& state, std::optional<double> level,
                      const SmibParams& params, std::ostream& out,
                      std::ostream& err);

inline constexpr const char* kSummaryCsvHeader =
    "index,axis,value,classification,eac_margin,in_omega,exit_time,diverged,"
    "error";

}  // namespace smib
