#include "smib/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smib {

const char* to_string(ControlMode mode) {
  return mode == ControlMode::Linear ? "linear" : "saturated";
}

void ControllerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
  require(std::isfinite(K) && K > 0.0, "K must be positive");
  require(std::isfinite(L) && L > 0.0, "L must be positive");
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
  require(!std::isnan(b) && b >= 0.0, "b must be non-negative");
  require(std::isfinite(hysteresis) && hysteresis >= 0.0,
          "hysteresis must be non-negative");
}

double sat(double w, double b) { return std::clamp(w, -b, b); }

double nominal_feedback_g(double u3, const SmibParams& params) {
  return restoring_power(u3, params);
}

double saturation_variable(double x3, double u3, const ControllerConfig& cfg,
                           const SmibParams& params) {
  return x3 - cfg.L * u3 - nominal_feedback_g(u3, params);
}

double phase_lead_rhs(double x3, double u3, const ControllerConfig& cfg) {
  return (-x3 + cfg.K * u3) / cfg.tau;
}

double phase_lead_output(double x3, double u3, const ControllerConfig& cfg) {
  return x3 - cfg.L * u3;
}

ControlMode mode_for(double w, double b) {
  return std::abs(w) < b ? ControlMode::Linear : ControlMode::Saturated;
}

ControlMode next_mode(double w, ControlMode previous,
                      const ControllerConfig& cfg) {
  if (cfg.hysteresis == 0.0) return mode_for(w, cfg.b);
  // Leave Linear only past b + band; re-enter Linear only inside b - band.
  const double threshold = previous == ControlMode::Linear
                               ? cfg.b + cfg.hysteresis
                               : cfg.b - cfg.hysteresis;
  return mode_for(w, threshold);
}

double controller_rhs(double x3, double u3, ControlMode mode,
                      const ControllerConfig& cfg) {
  if (mode == ControlMode::Linear) return phase_lead_rhs(x3, u3, cfg);
  // -alpha dV3/dx3 with V3 = x3^2 / (2K)
  return -(cfg.alpha / cfg.K) * x3;
}

double saturated_rhs(const ControllerState& state, double u3,
                     const ControllerConfig& cfg, const SmibParams& params) {
  const double w = saturation_variable(state.x3, u3, cfg, params);
  return controller_rhs(state.x3, u3, mode_for(w, cfg.b), cfg);
}

double battery_command(double x3, double u3, const ControllerConfig& cfg,
                       const SmibParams& params) {
  return sat(saturation_variable(x3, u3, cfg, params), cfg.b);
}

double saturated_output(const ControllerState& state, double u3,
                        const ControllerConfig& cfg, const SmibParams& params) {
  return nominal_feedback_g(u3, params) +
         battery_command(state.x3, u3, cfg, params);
}

}  // namespace smib
