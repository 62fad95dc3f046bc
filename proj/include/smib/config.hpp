#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smib/controllers.hpp"
#include "smib/model.hpp"
#include "smib/simulation.hpp"

// Scenario and sweep files. The format is YAML with one mapping per section:
//
//   plant:      { H, f0 | omega0, D, p_mech, p_max, p_storage_bar, M }
//   fault:      { delta0, delta_dot0, horizon }
//   controller: { tau, K, L, alpha, b, hysteresis }   # optional
//   sim:        { dt, record_stride, horizon }
//   outputs:    [csv, plot, report]
//
// Unknown keys are rejected. `b: inf` selects the unbounded actuator.

namespace smib {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputKind { Csv, Plot, Report };

const char* to_string(OutputKind kind);

struct ScenarioFile {
  SmibParams plant;
  FaultScenario fault;
  std::optional<ControllerConfig> controller;
  SimulationConfig sim;
  std::vector<OutputKind> outputs{OutputKind::Csv, OutputKind::Report};

  bool wants(OutputKind kind) const;
  double horizon() const { return sim.horizon.value_or(fault.horizon); }
  bool operator==(const ScenarioFile&) const = default;
};

enum class SweepAxis { Delta0, DeltaDot0, B, K, L };

const char* to_string(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Delta0;
  std::vector<double> values;
  ScenarioFile base;

  /// Base scenario with the swept field set to `value`.
  ScenarioFile point(double value) const;
};

ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::filesystem::path& path);

/// YAML text that parses back to an identical ScenarioFile.
std::string emit_scenario(const ScenarioFile& scenario);

SweepSpec parse_sweep(const std::string& text,
                      const std::filesystem::path& base_dir = {});
SweepSpec load_sweep(const std::filesystem::path& path);

/// Accepts finite numbers and the literals inf / .inf.
double parse_number_or_inf(const std::string& text);

}  // namespace smib
