#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smib/config.hpp"

namespace smib {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      ///< measured quantity (max violation, drift, ...)
  double threshold = 0.0;  ///< pass bound for `value`
  std::string detail;
};

struct VerificationOptions {
  double tolerance = 1e-4;        ///< finite-difference dissipation tolerance
  double energy_rel_tol = 1e-6;   ///< |W(t) - W(0)| <= tol * max(W(0), 1)
  std::size_t invariant_samples = 200;
  std::uint64_t seed = 20240611;
};

/// Runs the scenario and checks, numerically:
///   plant dissipation dV1/dt <= u1 dy1/dt,
///   controller dissipation (controlled runs),
///   monotone W / W_hat (and energy conservation when undamped, uncontrolled),
///   positivity of the Lyapunov candidate away from the origin,
///   Q1 positive definite and Q2 negative semidefinite (controlled runs),
///   forward invariance of Omega for the uncontrolled plant.
std::vector<CheckResult> run_verification(const ScenarioFile& scenario,
                                          const VerificationOptions& options = {});

}  // namespace smib
