#include "smib/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "smib/nni_analysis.hpp"
#include "smib/output.hpp"
#include "smib/stability.hpp"
#include "smib/verification.hpp"

namespace smib {

namespace fs = std::filesystem;

void RunOverrides::apply(ScenarioFile& scenario) const {
  if (dt) scenario.sim.dt = *dt;
  if (horizon) scenario.sim.horizon = *horizon;
  if (stride) scenario.sim.record_stride = *stride;
  try {
    scenario.sim.validate(scenario.horizon());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid override: ") + e.what());
  }
}

namespace {

struct RunArtifacts {
  Trajectory traj;
  StabilityReport report;
};

RunArtifacts run_and_write(const ScenarioFile& s, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  RunArtifacts a{simulate(s.fault, s.controller, s.plant, s.sim), {}};
  a.report = build_report(a.traj);
  {
    std::ofstream echo(out_dir / "scenario.yaml");
    echo << emit_scenario(s);
  }
  if (s.wants(OutputKind::Csv)) {
    write_trajectory_csv(out_dir / "trajectory.csv", a.traj);
  }
  if (s.wants(OutputKind::Report)) {
    write_report(out_dir / "report.yaml", a.report, a.traj);
  }
  if (s.wants(OutputKind::Plot)) {
    write_svg(out_dir / "angle_deviation.svg",
              {"Angle deviation", "time (s)", "angle deviation (rad)",
               {angle_series(a.traj, "delta_tilde")}});
    write_svg(out_dir / "battery_power.svg",
              {"Battery power output change", "time (s)",
               "battery power change (p.u.)",
               {battery_series(a.traj, "P_ST change")}});
  }
  return a;
}

std::string b_label(const ScenarioFile& s) {
  if (!s.controller) return "no controller";
  const double b = s.controller->b;
  return std::isinf(b) ? "b = inf" : "b = " + format_sig9(b);
}

}  // namespace

int cmd_simulate(const fs::path& scenario_path, const fs::path& out_dir,
                 const RunOverrides& overrides, std::ostream& log,
                 std::ostream& err) {
  ScenarioFile s;
  try {
    s = load_scenario(scenario_path);
    overrides.apply(s);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  RunArtifacts a;
  try {
    a = run_and_write(s, out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  log << "samples: " << a.traj.size() << '\n'
      << "empirical: " << to_string(a.report.empirical) << '\n'
      << "eac_margin: " << format_sig9(a.report.eac_margin) << '\n';
  if (a.traj.metadata.diverged) {
    err << "diverged at t=" << format_sig9(*a.traj.metadata.divergence_time)
        << " (|delta_tilde| > 4 pi)\n";
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_sweep(const fs::path& sweep_path, const fs::path& out_dir,
              const RunOverrides& overrides, unsigned jobs, std::ostream& log,
              std::ostream& err) {
  SweepSpec spec;
  try {
    spec = load_sweep(sweep_path);
    overrides.apply(spec.base);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  struct PointResult {
    ScenarioFile scenario;
    std::optional<RunArtifacts> run;
    std::string error;
  };
  const std::size_t n = spec.values.size();
  std::vector<PointResult> results(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      auto& r = results[i];
      try {
        r.scenario = spec.point(spec.values[i]);
        r.scenario.plant.validate();
        if (r.scenario.controller) r.scenario.controller->validate();
        char dir[32];
        std::snprintf(dir, sizeof dir, "point_%03zu", i);
        r.run = run_and_write(r.scenario, out_dir / dir);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::ofstream summary(out_dir / "summary.csv");
  summary << kSummaryCsvHeader << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = results[i];
    summary << i << ',' << to_string(spec.axis) << ','
            << format_sig9(spec.values[i]) << ',';
    if (r.run) {
      const auto& rep = r.run->report;
      summary << to_string(rep.empirical) << ',' << format_sig9(rep.eac_margin)
              << ',' << (rep.in_omega ? "true" : "false") << ','
              << (rep.saturation_exit_time ? format_sig9(*rep.saturation_exit_time)
                                           : std::string(r.scenario.controller ? "none" : ""))
              << ',' << (rep.diverged ? "true" : "false") << ",\n";
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      summary << "error,,,,," << msg << '\n';
    }
  }

  const bool plots = spec.base.wants(OutputKind::Plot);
  if (plots) {
    PlotSpec angle{"Angle deviation", "time (s)", "angle deviation (rad)", {}};
    PlotSpec battery{"Battery power output change", "time (s)",
                     "battery power change (p.u.)", {}};
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = results[i];
      if (!r.run) continue;
      const std::string label =
          spec.axis == SweepAxis::B ? b_label(r.scenario)
                                    : std::string(to_string(spec.axis)) + " = " +
                                          format_sig9(spec.values[i]);
      angle.series.push_back(angle_series(r.run->traj, label));
      if (r.scenario.controller) {
        battery.series.push_back(battery_series(r.run->traj, label));
      }
    }
    write_svg(out_dir / "angle_deviation.svg", angle);
    if (!battery.series.empty()) write_svg(out_dir / "battery_power.svg", battery);
  }

  std::size_t failed = 0;
  for (const auto& r : results) failed += r.run ? 0 : 1;
  log << "points: " << n << ", failed: " << failed << ", workers: " << jobs
      << '\n';
  return kExitOk;
}

int cmd_verify(const fs::path& scenario_path, const RunOverrides& overrides,
               std::ostream& out, std::ostream& err) {
  ScenarioFile s;
  try {
    s = load_scenario(scenario_path);
    overrides.apply(s);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto checks = run_verification(s);
  bool ok = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(62)
        << c.name << " value=" << format_sig9(c.value)
        << " bound=" << format_sig9(c.threshold);
    if (!c.detail.empty()) out << "  (" << c.detail << ')';
    out << '\n';
    ok = ok && c.passed;
  }
  if (!ok) {
    for (const auto& c : checks) {
      if (!c.passed) err << "violated: " << c.name << '\n';
    }
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_eac(double delta0, const SmibParams& params, std::ostream& out) {
  const double m = eac_margin(delta0, params);
  out << "delta_bar: " << format_sig9(params.delta_bar) << '\n'
      << "delta0: " << format_sig9(delta0) << '\n'
      << "eac_margin: " << format_sig9(m) << '\n'
      << "verdict: " << (m < 0.0 ? "stable" : "unstable") << '\n';
  return kExitOk;
}

int cmd_invariant_set(const PlantState& state, std::optional<double> level,
                      const SmibParams& params, std::ostream& out,
                      std::ostream& err) {
  const double cm = c_max(params);
  const double c = level.value_or(default_level(params));
  bool inside = false;
  try {
    inside = in_invariant_set(state, c, params);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << " (c_max = " << format_sig9(cm) << ")\n";
    return kExitConfig;
  }
  out << "c_max: " << format_sig9(cm) << '\n'
      << "c: " << format_sig9(c) << '\n'
      << "W: " << format_sig9(lyapunov_W(state, params)) << '\n'
      << "angle_bound: " << format_sig9(3.14159265358979323846 - 2.0 * params.delta_bar)
      << '\n'
      << "in_omega: " << (inside ? "true" : "false") << '\n';
  return kExitOk;
}

}  // namespace smib
