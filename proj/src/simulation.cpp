#include "smib/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace smib {

void SimulationConfig::validate(double effective_horizon) const {
  if (!(std::isfinite(dt) && dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  if (!(effective_horizon >= dt)) {
    throw std::invalid_argument("horizon must be at least dt");
  }
  if (record_stride < 1) {
    throw std::invalid_argument("record_stride must be >= 1");
  }
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& s : samples) t.push_back(s.t);
  return t;
}

std::vector<std::size_t> Trajectory::mode_switches() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].ctrl.mode != samples[i - 1].ctrl.mode) out.push_back(i);
  }
  return out;
}

namespace {

// [delta_tilde_dot, delta_tilde, x3]
using State = std::array<double, 3>;

}  // namespace

Trajectory simulate(const FaultScenario& scenario,
                    const std::optional<ControllerConfig>& controller,
                    const SmibParams& params, const SimulationConfig& sim) {
  scenario.validate();
  params.validate();
  if (controller) controller->validate();
  const double horizon = sim.horizon.value_or(scenario.horizon);
  sim.validate(horizon);

  const auto steps = static_cast<long long>(std::llround(horizon / sim.dt));
  const int stride = sim.record_stride;

  Trajectory traj;
  traj.dt = sim.dt * stride;
  traj.metadata = {scenario, controller, params, sim, horizon, false, {}};
  traj.samples.reserve(static_cast<std::size_t>(steps / stride + 1));

  State x{scenario.delta_dot0, scenario.delta0 - params.delta_bar, 0.0};
  ControlMode mode = ControlMode::Linear;
  if (controller) {
    mode = mode_for(saturation_variable(x[2], x[1], *controller, params),
                    controller->b);
  }

  for (long long k = 0;; ++k) {
    const double t = static_cast<double>(k) * sim.dt;
    double w = 0.0;
    double p_battery = 0.0;
    if (controller) {
      w = saturation_variable(x[2], x[1], *controller, params);
      mode = next_mode(w, mode, *controller);
      p_battery = sat(w, controller->b);
    }

    if (!all_finite(x) || std::abs(x[1]) > kDivergenceAngle) {
      traj.metadata.diverged = true;
      traj.metadata.divergence_time = t;
      if (all_finite(x) && k % stride == 0) {
        traj.samples.push_back({t, {x[0], x[1]}, {x[2], mode}, w, p_battery});
      }
      break;
    }
    if (k % stride == 0) {
      traj.samples.push_back({t, {x[0], x[1]}, {x[2], mode}, w, p_battery});
    }
    if (k == steps) break;

    const ControlMode frozen = mode;
    auto rhs = [&](const State& s) -> State {
      const PlantState plant{s[0], s[1]};
      if (!controller) {
        const PlantState d = swing_rhs(plant, 0.0, params);
        return {d.delta_tilde_dot, d.delta_tilde, 0.0};
      }
      const double u = battery_command(s[2], s[1], *controller, params);
      const PlantState d = swing_rhs(plant, u, params);
      return {d.delta_tilde_dot, d.delta_tilde,
              controller_rhs(s[2], s[1], frozen, *controller)};
    };
    x = rk4_step(x, rhs, sim.dt);
  }
  return traj;
}

std::optional<double> detect_saturation_exit(const Trajectory& traj, double b) {
  const auto& s = traj.samples;
  if (s.empty()) return 0.0;
  for (std::size_t i = s.size(); i-- > 0;) {
    if (!(std::abs(s[i].w) < b)) {
      if (i + 1 == s.size()) return std::nullopt;
      return s[i].t;
    }
  }
  return 0.0;
}

}  // namespace smib
