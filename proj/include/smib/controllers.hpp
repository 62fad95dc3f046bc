#pragma once

#include <limits>

#include "smib/model.hpp"

// Battery-based angle-feedback controllers.
//
// The phase-lead controller
//   dx3/dt = (-x3 + K u3) / tau,   y3 = x3 - L u3
// and its saturated anti-windup variant, which replaces the nominal feedback
// g(u3) and clips the battery command to [-b, b]:
//   w        = x3 - L u3 - g(u3)
//   dx3/dt   = (-x3 + K u3) / tau        if |w| <  b
//            = -(alpha / K) x3           if |w| >= b
//   y3_hat   = g(u3) + sat_b(w)
// The battery deviation command is y3_hat - g(u3) = sat_b(w).

namespace smib {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class ControlMode { Linear, Saturated };

const char* to_string(ControlMode mode);

struct ControllerConfig {
  double tau = 0.1;
  double K = 1.0;
  double L = 1.1;
  double alpha = 1.0;
  double b = kUnbounded;  ///< saturation bound, may be infinite
  /// Switching band around b. Zero reproduces the sharp threshold law.
  double hysteresis = 0.0;

  void validate() const;

  /// K - L < 0; the stabilizing design condition for the phase-lead loop.
  bool satisfies_design_condition() const { return K - L < 0.0; }

  bool operator==(const ControllerConfig&) const = default;
};

struct ControllerState {
  double x3 = 0.0;
  ControlMode mode = ControlMode::Linear;

  bool operator==(const ControllerState&) const = default;
};

/// Clamp to [-b, b]; sat(w, inf) == w.
double sat(double w, double b);

/// g(u3) = p_max sin(delta_bar) - p_max sin(u3 + delta_bar).
double nominal_feedback_g(double u3, const SmibParams& params);

/// w = x3 - L u3 - g(u3).
double saturation_variable(double x3, double u3, const ControllerConfig& cfg,
                           const SmibParams& params);

double phase_lead_rhs(double x3, double u3, const ControllerConfig& cfg);
double phase_lead_output(double x3, double u3, const ControllerConfig& cfg);

/// Sharp-threshold mode for a given saturation variable.
ControlMode mode_for(double w, double b);

/// Mode after re-evaluating the switching predicate with the configured
/// hysteresis band; identical to `mode_for` when the band is zero.
ControlMode next_mode(double w, ControlMode previous,
                      const ControllerConfig& cfg);

/// Controller vector field with the mode held fixed.
double controller_rhs(double x3, double u3, ControlMode mode,
                      const ControllerConfig& cfg);

/// Controller vector field with the mode taken from |w| < b at this point.
double saturated_rhs(const ControllerState& state, double u3,
                     const ControllerConfig& cfg, const SmibParams& params);

/// y3_hat = g(u3) + sat_b(w).
double saturated_output(const ControllerState& state, double u3,
                        const ControllerConfig& cfg, const SmibParams& params);

/// Battery power deviation sat_b(w).
double battery_command(double x3, double u3, const ControllerConfig& cfg,
                       const SmibParams& params);

}  // namespace smib
