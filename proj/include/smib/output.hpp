#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "smib/simulation.hpp"
#include "smib/stability.hpp"

namespace smib {

/// Fixed trajectory CSV header.
inline constexpr const char* kTrajectoryCsvHeader =
    "t,delta_tilde,delta_tilde_dot,x3,w,p_battery,mode,lyapunov";

/// `%.9g` formatting; "inf"/"-inf"/"nan" for non-finite values.
std::string format_sig9(double v);

/// One row per recorded sample. The lyapunov column is W for uncontrolled
/// runs and W_hat for controlled runs.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj);

void write_report(std::ostream& out, const StabilityReport& report,
                  const Trajectory& traj);
void write_report(const std::filesystem::path& path,
                  const StabilityReport& report, const Trajectory& traj);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 720;
  int height = 440;
};

/// Self-contained SVG line chart.
std::string render_svg(const PlotSpec& spec);
void write_svg(const std::filesystem::path& path, const PlotSpec& spec);

PlotSeries angle_series(const Trajectory& traj, std::string label);
PlotSeries battery_series(const Trajectory& traj, std::string label);

}  // namespace smib
