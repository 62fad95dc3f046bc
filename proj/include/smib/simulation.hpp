#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "smib/controllers.hpp"
#include "smib/model.hpp"

namespace smib {

struct SimulationConfig {
  double dt = 1e-3;
  /// Overrides FaultScenario::horizon when set.
  std::optional<double> horizon;
  int record_stride = 1;

  void validate(double effective_horizon) const;
  bool operator==(const SimulationConfig&) const = default;
};

struct TrajectorySample {
  double t = 0.0;
  PlantState plant;
  ControllerState ctrl;
  double w = 0.0;          ///< saturation variable (0 when uncontrolled)
  double p_battery = 0.0;  ///< battery deviation sat_b(w)
};

struct TrajectoryMetadata {
  FaultScenario scenario;
  std::optional<ControllerConfig> controller;
  SmibParams params;
  SimulationConfig sim;
  double horizon = 0.0;  ///< effective horizon
  bool diverged = false;
  std::optional<double> divergence_time;
};

/// Uniformly spaced record of a closed-loop run. Samples are immutable once
/// `simulate` returns.
struct Trajectory {
  double dt = 0.0;  ///< spacing between recorded samples
  std::vector<TrajectorySample> samples;
  TrajectoryMetadata metadata;

  bool controlled() const { return metadata.controller.has_value(); }
  std::size_t size() const { return samples.size(); }
  std::vector<double> times() const;
  /// Indices i where samples[i].ctrl.mode differs from samples[i-1].
  std::vector<std::size_t> mode_switches() const;
};

/// Divergence threshold on |delta_tilde|.
inline constexpr double kDivergenceAngle = 4.0 * 3.14159265358979323846;

/// One classical fourth-order Runge-Kutta step of dx/dt = rhs(x).
template <std::size_t N, class Rhs>
std::array<double, N> rk4_step(const std::array<double, N>& x, Rhs&& rhs,
                               double dt) {
  auto axpy = [](const std::array<double, N>& base,
                 const std::array<double, N>& dir, double h) {
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + h * dir[i];
    return out;
  };
  const std::array<double, N> k1 = rhs(x);
  const std::array<double, N> k2 = rhs(axpy(x, k1, 0.5 * dt));
  const std::array<double, N> k3 = rhs(axpy(x, k2, 0.5 * dt));
  const std::array<double, N> k4 = rhs(axpy(x, k3, dt));
  std::array<double, N> next;
  for (std::size_t i = 0; i < N; ++i) {
    next[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return next;
}

template <std::size_t N>
bool all_finite(const std::array<double, N>& x) {
  for (double v : x) {
    if (!(v - v == 0.0)) return false;
  }
  return true;
}

/// Integrates plant + controller from (delta_dot0, delta0 - delta_bar, 0).
/// With no controller the battery command is identically zero. The switching
/// predicate is evaluated once per step at the step-start state; the battery
/// command sat_b(w) is evaluated at every stage. Divergence (|delta_tilde| >
/// 4 pi or a non-finite state) stops the run and is flagged in the metadata.
Trajectory simulate(const FaultScenario& scenario,
                    const std::optional<ControllerConfig>& controller,
                    const SmibParams& params, const SimulationConfig& sim = {});

/// Earliest recorded time T such that |w| < b at every sample after T.
/// Returns 0 if the run never saturated, nullopt if the last sample is
/// saturated.
std::optional<double> detect_saturation_exit(const Trajectory& traj, double b);

}  // namespace smib
