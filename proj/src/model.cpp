#include "smib/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace smib {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

SmibParams SmibParams::from_operating_point(double H, double f0, double D,
                                            double p_mech, double p_max,
                                            double p_storage_bar) {
  require(f0 > 0.0, "f0 must be positive");
  SmibParams p;
  p.H = H;
  p.omega0 = 2.0 * std::numbers::pi * f0;
  p.M = inertia_from_H(H, f0);
  p.D = D;
  p.p_mech = p_mech;
  p.p_max = p_max;
  p.p_storage_bar = p_storage_bar;
  p.delta_bar = equilibrium_angle(p_mech + p_storage_bar, p_max);
  p.validate();
  return p;
}

void SmibParams::validate() const {
  require(std::isfinite(M) && M > 0.0, "M must be positive");
  require(std::isfinite(H) && H > 0.0, "H must be positive");
  require(std::isfinite(omega0) && omega0 > 0.0, "omega0 must be positive");
  require(std::isfinite(D) && D >= 0.0, "D must be non-negative");
  require(std::isfinite(p_max) && p_max > 0.0, "p_max must be positive");
  require(delta_bar > 0.0 && delta_bar < std::numbers::pi / 2.0,
          "delta_bar must lie in (0, pi/2)");
  require(std::isfinite(p_mech) && std::isfinite(p_storage_bar),
          "powers must be finite");
  require(std::abs(p_mech + p_storage_bar - p_max * std::sin(delta_bar)) <=
              1e-12,
          "operating point is not an equilibrium: p_mech + p_storage_bar != "
          "p_max sin(delta_bar)");
}

void FaultScenario::validate() const {
  require(std::isfinite(delta0) && std::isfinite(delta_dot0),
          "fault initial state must be finite");
  require(std::isfinite(horizon) && horizon > 0.0, "horizon must be positive");
}

double electric_power(double delta, double p_max) {
  return p_max * std::sin(delta);
}

double equilibrium_angle(double p_injection, double p_max) {
  require(p_max > 0.0, "p_max must be positive");
  require(p_injection >= 0.0, "power injection must be non-negative");
  require(p_injection < p_max,
          "power injection at or above p_max has no stable equilibrium");
  return std::asin(p_injection / p_max);
}

double inertia_from_H(double H, double f0) {
  return 2.0 * H / (2.0 * std::numbers::pi * f0);
}

double restoring_power(double delta_tilde, const SmibParams& params) {
  return params.p_max * std::sin(params.delta_bar) -
         params.p_max * std::sin(delta_tilde + params.delta_bar);
}

PlantState swing_rhs(const PlantState& state, double p_control,
                     const SmibParams& params) {
  const double accel = (p_control + restoring_power(state.delta_tilde, params) -
                        params.D * state.delta_tilde_dot) /
                       params.M;
  return {accel, state.delta_tilde_dot};
}

double rotor_angle(double t, const PlantState& state,
                   const SmibParams& params) {
  return params.omega0 * t + params.delta_bar + state.delta_tilde;
}

double rotor_speed(const PlantState& state, const SmibParams& params) {
  return params.omega0 + state.delta_tilde_dot;
}

}  // namespace smib
