#pragma once

// Single-machine-infinite-bus plant: swing dynamics in angle-deviation
// coordinates around the pre-fault operating point.
//
// Units: powers per-unit, angles rad, time s.

namespace smib {

/// Physical plant constants. Build with `SmibParams::from_operating_point`
/// so that the steady-state angle is consistent with the power balance.
struct SmibParams {
  double H = 0.0;        ///< inertia constant (s)
  double omega0 = 0.0;   ///< nominal angular frequency (rad/s)
  double M = 0.0;        ///< inertia coefficient, 2H/omega0 unless overridden
  double D = 0.0;        ///< damping coefficient
  double p_mech = 0.0;   ///< pre-fault mechanical power
  double p_max = 0.0;    ///< maximum electric power transfer
  double delta_bar = 0.0;      ///< steady-state angle (rad)
  double p_storage_bar = 0.0;  ///< pre-fault battery output

  /// Derives omega0 = 2*pi*f0, M = 2H/omega0 and delta_bar from the power
  /// balance p_mech + p_storage_bar = p_max sin(delta_bar).
  static SmibParams from_operating_point(double H, double f0, double D,
                                         double p_mech, double p_max,
                                         double p_storage_bar = 0.0);

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  bool operator==(const SmibParams&) const = default;
};

/// x1 = [d(delta_tilde)/dt, delta_tilde].
struct PlantState {
  double delta_tilde_dot = 0.0;
  double delta_tilde = 0.0;

  bool operator==(const PlantState&) const = default;
};

struct FaultScenario {
  double delta0 = 0.0;      ///< post-fault initial absolute angle (rad)
  double delta_dot0 = 0.0;  ///< post-fault initial rate (rad/s)
  double horizon = 20.0;    ///< simulation length (s)

  void validate() const;
  bool operator==(const FaultScenario&) const = default;
};

double electric_power(double delta, double p_max);

/// Principal-branch solution of p_injection = p_max sin(delta), in [0, pi/2).
/// Throws std::invalid_argument for negative inputs or p_injection >= p_max.
double equilibrium_angle(double p_injection, double p_max);

/// M = 2H / (2 pi f0).
double inertia_from_H(double H, double f0);

/// Time derivative of the plant state. `p_control` is the battery power
/// deviation from its pre-fault value; zero for the uncontrolled machine.
PlantState swing_rhs(const PlantState& state, double p_control,
                     const SmibParams& params);

/// Restoring power p_max sin(delta_bar) - p_max sin(delta_tilde + delta_bar).
double restoring_power(double delta_tilde, const SmibParams& params);

/// Rotor angle in the stationary frame, omega0 t + delta_bar + delta_tilde.
double rotor_angle(double t, const PlantState& state, const SmibParams& params);

/// Rotor speed omega0 + d(delta_tilde)/dt.
double rotor_speed(const PlantState& state, const SmibParams& params);

}  // namespace smib
