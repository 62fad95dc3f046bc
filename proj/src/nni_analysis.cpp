#include "smib/nni_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smib {

double storage_V1(const PlantState& state, const SmibParams& params) {
  return 0.5 * params.M * state.delta_tilde_dot * state.delta_tilde_dot;
}

double storage_V3(double x3, double K) { return x3 * x3 / (2.0 * K); }

double gamma(double delta_tilde, const SmibParams& params) {
  const double s = std::sin(params.delta_bar);
  const double c = std::cos(params.delta_bar);
  return params.p_max *
         (-delta_tilde * s + c - std::cos(delta_tilde + params.delta_bar));
}

double lyapunov_W(const PlantState& state, const SmibParams& params) {
  return storage_V1(state, params) + gamma(state.delta_tilde, params);
}

bool in_positivity_domain(const PlantState& state, const SmibParams& params) {
  if (state.delta_tilde_dot == 0.0 && state.delta_tilde == 0.0) return true;
  const double d = state.delta_tilde;
  return std::cos(params.delta_bar) >
         std::cos(d + params.delta_bar) + d * std::sin(params.delta_bar);
}

FBranch f_branch(double w, double b) {
  if (w <= -b) return FBranch::Lower;
  if (w >= b) return FBranch::Upper;
  return FBranch::Interior;
}

double integral_of_g(double delta_tilde, const SmibParams& params) {
  return -gamma(delta_tilde, params);
}

double F_integral(const PlantState& state, double x3, FBranch branch,
                  const ControllerConfig& cfg, const SmibParams& params) {
  const double d = state.delta_tilde;
  switch (branch) {
    case FBranch::Lower:
      return integral_of_g(d, params) - cfg.b * d;
    case FBranch::Upper:
      return integral_of_g(d, params) + cfg.b * d;
    case FBranch::Interior:
      break;
  }
  return x3 * d - 0.5 * cfg.L * d * d;
}

double F_integral(const PlantState& state, double x3,
                  const ControllerConfig& cfg, const SmibParams& params) {
  const double w = saturation_variable(x3, state.delta_tilde, cfg, params);
  return F_integral(state, x3, f_branch(w, cfg.b), cfg, params);
}

double lyapunov_W_hat(const PlantState& state, const ControllerState& ctrl,
                      const ControllerConfig& cfg, const SmibParams& params) {
  return storage_V1(state, params) + storage_V3(ctrl.x3, cfg.K) -
         F_integral(state, ctrl.x3, cfg, params);
}

double lyapunov_W_lead(const PlantState& state, double x3,
                       const ControllerConfig& cfg, const SmibParams& params) {
  const double v = state.delta_tilde_dot;
  const double d = state.delta_tilde;
  return 0.5 * (params.M * v * v + cfg.L * d * d - 2.0 * d * x3 +
                x3 * x3 / cfg.K);
}

std::vector<double> finite_difference(std::span<const double> t,
                                      std::span<const double> v) {
  const std::size_t n = v.size();
  if (t.size() != n) {
    throw std::invalid_argument("time grid and series lengths differ");
  }
  if (n < 3) {
    throw std::invalid_argument("at least three samples are required");
  }
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (v[i + 1] - v[i - 1]) / (t[i + 1] - t[i - 1]);
  }
  const double h0 = t[1] - t[0];
  const double hn = t[n - 1] - t[n - 2];
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h0);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * hn);
  return d;
}

std::vector<LyapunovSample> lyapunov_samples(std::span<const double> t,
                                             std::span<const double> v) {
  const auto d = finite_difference(t, v);
  std::vector<LyapunovSample> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = {t[i], v[i], d[i]};
  return out;
}

DissipationReport check_dissipation(std::span<const double> t,
                                    std::span<const double> storage,
                                    std::span<const double> supply, double tol,
                                    std::span<const std::size_t> excluded) {
  if (supply.size() != storage.size()) {
    throw std::invalid_argument("storage and supply series lengths differ");
  }
  const auto vdot = finite_difference(t, storage);
  std::vector<bool> skip(storage.size(), false);
  for (std::size_t i : excluded) {
    if (i < skip.size()) skip[i] = true;
  }

  DissipationReport report;
  report.tolerance = tol;
  report.max_violation = -std::numeric_limits<double>::infinity();
  // Endpoints only have one-sided estimates; compare the interior.
  for (std::size_t i = 1; i + 1 < vdot.size(); ++i) {
    if (skip[i]) continue;
    const double violation = vdot[i] - supply[i];
    ++report.compared;
    report.max_violation = std::max(report.max_violation, violation);
    if (!(violation <= tol)) report.violation_times.push_back(t[i]);
  }
  if (report.compared == 0) report.max_violation = 0.0;
  report.passed = report.max_violation <= tol;
  return report;
}

std::vector<std::size_t> switch_exclusion(const Trajectory& traj) {
  std::vector<std::size_t> out;
  for (std::size_t i : traj.mode_switches()) {
    // i is the first sample of the new mode; the kink lies in (i-1, i].
    for (std::size_t j = i - 1; j <= i + 1; ++j) {
      if (j < traj.size()) out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DissipationReport check_dissipation(const Trajectory& traj,
                                    std::span<const double> storage,
                                    std::span<const double> supply,
                                    double tol) {
  const auto t = traj.times();
  const auto excluded = switch_exclusion(traj);
  return check_dissipation(t, storage, supply, tol, excluded);
}

std::vector<double> series_V1(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj.samples) {
    out.push_back(storage_V1(s.plant, traj.metadata.params));
  }
  return out;
}

std::vector<double> series_plant_supply(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj.samples) {
    const double u1 =
        nominal_feedback_g(s.plant.delta_tilde, traj.metadata.params) +
        s.p_battery;
    out.push_back(u1 * s.plant.delta_tilde_dot);
  }
  return out;
}

std::vector<double> series_V3(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  const double K = traj.controlled() ? traj.metadata.controller->K : 1.0;
  for (const auto& s : traj.samples) out.push_back(storage_V3(s.ctrl.x3, K));
  return out;
}

std::vector<double> series_controller_supply(const Trajectory& traj) {
  std::vector<double> out(traj.size(), 0.0);
  if (!traj.controlled()) return out;
  const auto& cfg = *traj.metadata.controller;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.samples[i];
    if (s.ctrl.mode == ControlMode::Linear) {
      // h3(x3) = x3, so dh3/dt is the controller vector field.
      out[i] = s.plant.delta_tilde *
               phase_lead_rhs(s.ctrl.x3, s.plant.delta_tilde, cfg);
    }
  }
  return out;
}

std::vector<double> series_lyapunov(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  const auto& params = traj.metadata.params;
  for (const auto& s : traj.samples) {
    out.push_back(traj.controlled()
                      ? lyapunov_W_hat(s.plant, s.ctrl,
                                       *traj.metadata.controller, params)
                      : lyapunov_W(s.plant, params));
  }
  return out;
}

double min_lyapunov_off_origin(const Trajectory& traj, double radius) {
  const auto v = series_lyapunov(traj);
  double lo = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& s = traj.samples[i];
    const double r = std::hypot(s.plant.delta_tilde_dot, s.plant.delta_tilde,
                                s.ctrl.x3);
    if (r <= radius) continue;
    if (std::isnan(lo) || v[i] < lo) lo = v[i];
  }
  return lo;
}

}  // namespace smib
