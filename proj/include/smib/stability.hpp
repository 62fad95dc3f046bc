#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "smib/controllers.hpp"
#include "smib/model.hpp"
#include "smib/simulation.hpp"

namespace smib {

/// Equal-area margin
///   (pi - delta_bar - delta0) sin(delta_bar) - cos(delta_bar) - cos(delta0).
/// Negative means the undamped, uncontrolled machine released at rest from
/// delta0 stays synchronised.
double eac_margin(double delta0, const SmibParams& params);

/// Supremum of admissible level values for the invariant set,
/// Gamma(pi - 2 delta_bar) = p_max (2 cos(delta_bar) - (pi - 2 delta_bar)
/// sin(delta_bar)). Throws if delta_bar is outside (0, pi/2).
double c_max(const SmibParams& params);

/// Default level value used for Omega membership.
double default_level(const SmibParams& params);

/// Omega = { W(x1) <= c and |delta_tilde| <= pi - 2 delta_bar }.
/// Throws unless 0 < c < c_max.
bool in_invariant_set(const PlantState& state, double c,
                      const SmibParams& params);

/// Uniform rejection samples from Omega at level c (fixed seed, so the draw
/// is reproducible).
std::vector<PlantState> sample_invariant_set(const SmibParams& params, double c,
                                             std::size_t count,
                                             std::uint64_t seed);

/// True if every recorded sample of `traj` lies in Omega at level c.
bool stays_in_invariant_set(const Trajectory& traj, double c);

Eigen::Matrix3d q1_matrix(const ControllerConfig& cfg,
                          const SmibParams& params);
Eigen::Matrix3d q2_matrix(const ControllerConfig& cfg,
                          const SmibParams& params);

/// Sylvester's criterion on leading principal minors.
bool is_positive_definite(const Eigen::Matrix3d& q);

/// All eigenvalues <= tol.
bool is_negative_semidefinite(const Eigen::Matrix3d& q, double tol = 1e-12);

enum class Verdict { Stable, Unstable, Undecided };

const char* to_string(Verdict v);

struct OracleResult {
  Verdict verdict = Verdict::Undecided;
  bool converged = false;      ///< final-window |delta_tilde| below tolerance
  double max_abs_delta = 0.0;  ///< max |delta_tilde| over the run
  double final_window_amplitude = 0.0;
  bool diverged = false;
};

struct OracleSettings {
  /// Slack added to pi - 2 delta_bar for the boundedness test (rad).
  double bound_margin = 0.05;
  /// |delta_tilde| above this is loss of synchronism (rad).
  double unstable_angle = 3.14159265358979323846;
  double convergence_tolerance = 0.01;
  /// Length of the trailing window used for convergence (s).
  double final_window = 2.0;
};

/// Simulation-based classification used to cross-check the analytic
/// predicates.
OracleResult classify_trajectory(const Trajectory& traj,
                                 const OracleSettings& settings = {});

OracleResult classify_by_simulation(
    const FaultScenario& scenario,
    const std::optional<ControllerConfig>& controller,
    const SmibParams& params, const SimulationConfig& sim = {},
    const OracleSettings& settings = {});

struct StabilityReport {
  double eac_margin = 0.0;
  double c_max = 0.0;
  double level = 0.0;  ///< c used for Omega membership
  double initial_W = 0.0;
  bool in_omega = false;
  std::optional<bool> q1_positive_definite;
  std::optional<bool> q2_negative_semidefinite;
  std::optional<bool> design_condition;  ///< K - L < 0
  Verdict empirical = Verdict::Undecided;
  bool empirical_stable = false;
  bool empirical_converged = false;
  std::optional<double> saturation_exit_time;
  bool diverged = false;
};

/// Analytic predicates for the scenario's initial state plus the empirical
/// classification of an already simulated trajectory.
StabilityReport build_report(const Trajectory& traj,
                             const OracleSettings& settings = {});

}  // namespace smib
