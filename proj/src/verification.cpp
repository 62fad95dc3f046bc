#include "smib/verification.hpp"

#include <algorithm>
#include <cmath>

#include "smib/nni_analysis.hpp"
#include "smib/stability.hpp"

namespace smib {

namespace {

CheckResult dissipation_check(std::string name, const DissipationReport& r) {
  std::string detail = std::to_string(r.compared) + " samples compared";
  if (!r.violation_times.empty()) {
    detail += ", first violation at t=" + std::to_string(r.violation_times.front());
  }
  return {std::move(name), r.passed, r.max_violation, r.tolerance,
          std::move(detail)};
}

}  // namespace

std::vector<CheckResult> run_verification(const ScenarioFile& scenario,
                                          const VerificationOptions& options) {
  std::vector<CheckResult> out;
  const auto& params = scenario.plant;
  const Trajectory traj =
      simulate(scenario.fault, scenario.controller, params, scenario.sim);

  out.push_back(dissipation_check(
      "plant dissipation dV1/dt <= u1 dy1/dt",
      check_dissipation(traj, series_V1(traj), series_plant_supply(traj),
                        options.tolerance)));
  if (traj.metadata.diverged) {
    // Finite-difference error grows with the slip speed after loss of
    // synchronism; say so next to the number.
    out.back().detail += ", run diverged at t=" +
                         std::to_string(*traj.metadata.divergence_time);
  }

  const auto lyap = series_lyapunov(traj);
  const std::vector<double> zero(traj.size(), 0.0);

  if (scenario.controller) {
    const auto& cfg = *scenario.controller;
    out.push_back(dissipation_check(
        "controller dissipation dV3/dt <= u3 dh3/dt (0 when saturated)",
        check_dissipation(traj, series_V3(traj), series_controller_supply(traj),
                          options.tolerance)));
    out.push_back(dissipation_check(
        "W_hat nonincreasing",
        check_dissipation(traj, lyap, zero, options.tolerance)));

    out.push_back({"Q1 positive definite (K - L < 0)",
                   is_positive_definite(q1_matrix(cfg, params)), cfg.K - cfg.L,
                   0.0, "value is K - L"});
    const Eigen::Matrix3d q2 = q2_matrix(cfg, params);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(q2,
                                                       Eigen::EigenvaluesOnly);
    out.push_back({"Q2 negative semidefinite", is_negative_semidefinite(q2),
                   eig.eigenvalues().maxCoeff(), 1e-12,
                   "value is the largest eigenvalue"});
  } else {
    out.push_back(dissipation_check(
        "W nonincreasing", check_dissipation(traj, lyap, zero, options.tolerance)));
    if (params.D == 0.0 && !lyap.empty()) {
      double drift = 0.0;
      for (double v : lyap) drift = std::max(drift, std::abs(v - lyap.front()));
      const double bound = options.energy_rel_tol * std::max(lyap.front(), 1.0);
      out.push_back({"energy conservation max|W(t) - W(0)| (D = 0)",
                     drift <= bound, drift, bound, ""});
    }
  }

  const double lowest = min_lyapunov_off_origin(traj);
  out.push_back({scenario.controller ? "W_hat positive away from the origin"
                                     : "W positive away from the origin",
                 !(lowest <= 0.0), lowest, 0.0,
                 "value is the smallest sampled candidate value"});

  // Forward invariance of Omega for the plant without battery support.
  const double level = default_level(params);
  const auto starts = sample_invariant_set(params, level,
                                           options.invariant_samples,
                                           options.seed);
  std::size_t escaped = 0;
  for (const auto& x0 : starts) {
    FaultScenario f = scenario.fault;
    f.delta0 = params.delta_bar + x0.delta_tilde;
    f.delta_dot0 = x0.delta_tilde_dot;
    const Trajectory t = simulate(f, std::nullopt, params, scenario.sim);
    if (!stays_in_invariant_set(t, level)) ++escaped;
  }
  out.push_back({"Omega forward invariance (uncontrolled)", escaped == 0,
                 static_cast<double>(escaped), 0.0,
                 std::to_string(starts.size()) + " sampled initial states"});

  return out;
}

}  // namespace smib
