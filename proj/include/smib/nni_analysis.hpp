#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smib/controllers.hpp"
#include "smib/model.hpp"
#include "smib/simulation.hpp"

// Storage functions, Lur'e-Postnikov Lyapunov candidates and a numerical
// dissipation-inequality checker. All path integrals are evaluated in closed
// form.

namespace smib {

/// V1(x1) = (M/2) (d delta_tilde/dt)^2.
double storage_V1(const PlantState& state, const SmibParams& params);

/// The static nonlinearity carries no state; its storage is identically zero.
inline double storage_V2() { return 0.0; }

/// V3(x3) = x3^2 / (2K).
double storage_V3(double x3, double K);

/// Gamma(d) = -p_max d sin(delta_bar) + p_max cos(delta_bar)
///            - p_max cos(d + delta_bar).
/// Equals minus the integral of g from 0 to d.
double gamma(double delta_tilde, const SmibParams& params);

/// W(x1) = V1(x1) + Gamma(delta_tilde) for the uncontrolled loop.
double lyapunov_W(const PlantState& state, const SmibParams& params);

/// True when (state) lies in the domain where W is positive definite:
/// cos(delta_bar) > cos(delta_tilde + delta_bar) + delta_tilde sin(delta_bar),
/// or the origin.
bool in_positivity_domain(const PlantState& state, const SmibParams& params);

/// Branch of the piecewise output integral, selected by the saturation
/// variable w: Lower (w <= -b), Interior (|w| < b), Upper (w >= b).
enum class FBranch { Lower, Interior, Upper };

FBranch f_branch(double w, double b);

/// Integral of g(xi) from 0 to d, closed form.
double integral_of_g(double delta_tilde, const SmibParams& params);

/// Closed-form F for a given branch.
double F_integral(const PlantState& state, double x3, FBranch branch,
                  const ControllerConfig& cfg, const SmibParams& params);

/// Closed-form F with the branch selected by the current saturation variable.
double F_integral(const PlantState& state, double x3,
                  const ControllerConfig& cfg, const SmibParams& params);

/// W_hat(x1, x3) = V1 + V3 - F for the saturated loop.
double lyapunov_W_hat(const PlantState& state, const ControllerState& ctrl,
                      const ControllerConfig& cfg, const SmibParams& params);

/// Quadratic W(x1, x3) = 1/2 z' Q1 z, z = (delta_tilde_dot, delta_tilde, x3),
/// for the unsaturated phase-lead loop.
double lyapunov_W_lead(const PlantState& state, double x3,
                       const ControllerConfig& cfg, const SmibParams& params);

struct LyapunovSample {
  double t = 0.0;
  double value = 0.0;
  double derivative_estimate = 0.0;
};

struct DissipationReport {
  double max_violation = 0.0;  ///< max over compared samples of dV/dt - supply
  std::vector<double> violation_times;
  bool passed = true;
  double tolerance = 0.0;
  std::size_t compared = 0;
};

/// Default tolerance for finite-difference dissipation checks (per-unit/s).
inline constexpr double kDissipationTolerance = 1e-4;

/// Second-order finite-difference derivative: central differences on interior
/// points and one-sided three-point formulas at the ends. Requires a uniform
/// grid of at least three points.
std::vector<double> finite_difference(std::span<const double> t,
                                      std::span<const double> v);

std::vector<LyapunovSample> lyapunov_samples(std::span<const double> t,
                                             std::span<const double> v);

/// Checks dV/dt <= supply at every interior sample not listed in `excluded`,
/// with dV/dt from central differences.
/// Throws std::invalid_argument for mismatched lengths or fewer than three
/// samples.
DissipationReport check_dissipation(std::span<const double> t,
                                    std::span<const double> storage,
                                    std::span<const double> supply, double tol,
                                    std::span<const std::size_t> excluded = {});

/// Trajectory form: samples within one step of a mode switch are excluded,
/// since dV/dt is discontinuous there.
DissipationReport check_dissipation(const Trajectory& traj,
                                    std::span<const double> storage,
                                    std::span<const double> supply,
                                    double tol = kDissipationTolerance);

/// Sample indices within +-1 of every mode switch.
std::vector<std::size_t> switch_exclusion(const Trajectory& traj);

// Series evaluated along a recorded trajectory.

std::vector<double> series_V1(const Trajectory& traj);
/// u1 * dy1/dt with u1 = g(delta_tilde) + p_battery and y1 = delta_tilde.
std::vector<double> series_plant_supply(const Trajectory& traj);
std::vector<double> series_V3(const Trajectory& traj);
/// u3 * dh3/dt in Linear mode, 0 in Saturated mode.
std::vector<double> series_controller_supply(const Trajectory& traj);
/// W for uncontrolled runs, W_hat for controlled runs.
std::vector<double> series_lyapunov(const Trajectory& traj);

/// Smallest Lyapunov value (W or W_hat) over the samples farther than
/// `radius` from the origin of (delta_tilde_dot, delta_tilde, x3). A positive
/// result means the candidate is positive on the visited part of the domain.
/// NaN if no sample qualifies.
double min_lyapunov_off_origin(const Trajectory& traj, double radius = 1e-4);

}  // namespace smib
