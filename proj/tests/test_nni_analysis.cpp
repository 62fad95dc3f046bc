#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "smib/nni_analysis.hpp"
#include "smib/simulation.hpp"
#include "support.hpp"

namespace smib {
namespace {

constexpr double kPi = std::numbers::pi;

class NniTest : public ::testing::Test {
 protected:
  SmibParams p = test::reference_plant();
  double fault_dt = 0.2 - p.delta_bar;  // -0.727295
};

TEST_F(NniTest, StorageFunctions) {
  EXPECT_EQ(storage_V1({0.0, 3.0}, p), 0.0);
  EXPECT_NEAR(storage_V1({1.0, 0.0}, p), 0.0127324, 5e-8);
  SmibParams unit = p;
  unit.M = 1.0;
  EXPECT_DOUBLE_EQ(storage_V1({2.0, 5.0}, unit), 2.0);
  EXPECT_EQ(storage_V2(), 0.0);
  EXPECT_EQ(storage_V3(0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(storage_V3(1.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(storage_V3(2.0, 4.0), 0.5);
}

TEST_F(NniTest, GammaExamples) {
  EXPECT_EQ(gamma(0.0, p), 0.0);
  EXPECT_NEAR(gamma(kPi - 2.0 * p.delta_bar, p), 0.170398, 5e-7);
  EXPECT_NEAR(gamma(fault_dt, p), 0.201769, 1e-6);
  // -0.24 + 0.6 - cos(1.227295)
  EXPECT_NEAR(gamma(0.3, p), 0.023214, 5e-7);
}

TEST_F(NniTest, GammaMatchesQuadrature) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double d = u(rng);
    const double q = test::simpson64(
        [&](double xi) { return test::g_direct(xi, p); }, 0.0, d);
    EXPECT_NEAR(gamma(d, p), -q, 5e-8);
    EXPECT_NEAR(integral_of_g(d, p), q, 5e-8);
  }
}

TEST_F(NniTest, LyapunovWExamples) {
  EXPECT_EQ(lyapunov_W({0.0, 0.0}, p), 0.0);
  EXPECT_NEAR(lyapunov_W({0.0, fault_dt}, p), 0.201769, 1e-6);
  EXPECT_NEAR(lyapunov_W({1.0, 0.0}, p), 0.0127324, 5e-8);
}

TEST_F(NniTest, WPositiveOnDomain) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  std::uniform_real_distribution<double> uv(-10.0, 10.0);
  int checked = 0;
  for (int i = 0; i < 20000; ++i) {
    const PlantState s{uv(rng), ud(rng)};
    if (!in_positivity_domain(s, p)) continue;
    ++checked;
    EXPECT_GT(lyapunov_W(s, p), 0.0) << s.delta_tilde_dot << ", " << s.delta_tilde;
  }
  EXPECT_GT(checked, 1000);
  EXPECT_TRUE(in_positivity_domain({0.0, 0.0}, p));
  EXPECT_FALSE(in_positivity_domain({0.0, 2.0}, p));
}

TEST_F(NniTest, FBranchSelection) {
  EXPECT_EQ(f_branch(0.0, 0.2), FBranch::Interior);
  EXPECT_EQ(f_branch(0.2, 0.2), FBranch::Upper);
  EXPECT_EQ(f_branch(-0.2, 0.2), FBranch::Lower);
  EXPECT_EQ(f_branch(1e9, kUnbounded), FBranch::Interior);
  // With b = 0 there is no interior.
  EXPECT_NE(f_branch(0.0, 0.0), FBranch::Interior);
}

TEST_F(NniTest, FIntegralExamples) {
  const auto cfg = test::reference_controller(0.2);
  for (auto br : {FBranch::Lower, FBranch::Interior, FBranch::Upper}) {
    EXPECT_EQ(F_integral({0.3, 0.0}, 0.7, br, cfg, p), 0.0);
  }
  EXPECT_NEAR(F_integral({0.0, 0.5}, 0.2, FBranch::Interior, cfg, p), -0.0375,
              1e-15);
  EXPECT_NEAR(F_integral({0.0, fault_dt}, 0.1, FBranch::Upper, cfg, p),
              -0.347228, 1e-6);
  // Auto branch: x3 = 0.1 puts w = 0.298694 >= b.
  EXPECT_NEAR(F_integral({0.0, fault_dt}, 0.1, cfg, p), -0.347228, 1e-6);
}

TEST_F(NniTest, FIntegralMatchesQuadrature) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  auto cfg = test::reference_controller(0.3);
  for (int i = 0; i < 300; ++i) {
    const double d = u(rng);
    const double x3 = u(rng);
    const PlantState s{0.0, d};
    const double lower = test::simpson64(
        [&](double xi) { return test::g_direct(xi, p) - cfg.b; }, 0.0, d);
    const double upper = test::simpson64(
        [&](double xi) { return test::g_direct(xi, p) + cfg.b; }, 0.0, d);
    const double interior = test::simpson64(
        [&](double xi) { return x3 - cfg.L * xi; }, 0.0, d);
    EXPECT_NEAR(F_integral(s, x3, FBranch::Lower, cfg, p), lower, 5e-8);
    EXPECT_NEAR(F_integral(s, x3, FBranch::Upper, cfg, p), upper, 5e-8);
    EXPECT_NEAR(F_integral(s, x3, FBranch::Interior, cfg, p), interior, 1e-12);
  }
}

TEST_F(NniTest, WHatExamples) {
  const auto inf = test::reference_controller(kUnbounded);
  EXPECT_EQ(lyapunov_W_hat({0.0, 0.0}, {0.0, ControlMode::Linear}, inf, p), 0.0);
  const double interior = 1.1 * fault_dt * fault_dt / 2.0;
  EXPECT_NEAR(interior, 0.290927, 5e-7);
  EXPECT_NEAR(lyapunov_W_hat({0.0, fault_dt}, {0.0, ControlMode::Linear}, inf, p),
              interior, 1e-15);

  const auto b02 = test::reference_controller(0.2);
  // x3 = 0 gives w = 0.198694 < b: still the interior branch.
  EXPECT_NEAR(saturation_variable(0.0, fault_dt, b02, p), 0.198694, 5e-7);
  EXPECT_NEAR(lyapunov_W_hat({0.0, fault_dt}, {0.0, ControlMode::Linear}, b02, p),
              interior, 1e-15);
  // x3 = 0.1 gives w = 0.298694 >= b: V3 - integral of (g + b).
  EXPECT_NEAR(lyapunov_W_hat({0.0, fault_dt}, {0.1, ControlMode::Saturated}, b02, p),
              0.005 + 0.347228, 1e-6);
}

TEST_F(NniTest, WLeadExamples) {
  const auto cfg = test::reference_controller(kUnbounded);
  EXPECT_EQ(lyapunov_W_lead({0.0, 0.0}, 0.0, cfg, p), 0.0);
  EXPECT_NEAR(lyapunov_W_lead({0.0, 1.0}, 1.0, cfg, p), 0.05, 1e-15);
  EXPECT_NEAR(lyapunov_W_lead({1.0, 0.0}, 0.0, cfg, p), 0.0127324, 5e-8);
}

TEST_F(NniTest, WHatUnboundedEqualsQuadraticForm) {
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> ug(0.2, 3.0);
  for (int i = 0; i < 1000; ++i) {
    auto cfg = test::reference_controller(kUnbounded);
    cfg.K = ug(rng);
    cfg.L = ug(rng);
    const PlantState s{u(rng), u(rng)};
    const double x3 = u(rng);
    const double w_hat = lyapunov_W_hat(s, {x3, ControlMode::Linear}, cfg, p);
    EXPECT_NEAR(w_hat, lyapunov_W_lead(s, x3, cfg, p),
                1e-12 * std::max(1.0, std::abs(w_hat)));
  }
}

// At |w| = b the adjacent integrands agree at the upper limit, so the output
// is continuous. The integrals themselves differ by
//   int_0^d g - d g(d) - L d^2 / 2,
// which vanishes only at d = 0.
TEST_F(NniTest, BranchBoundaryBehaviour) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  const auto cfg = test::reference_controller(0.2);
  for (int i = 0; i < 500; ++i) {
    const double d = u(rng);
    const PlantState s{0.0, d};
    const double g = test::g_direct(d, p);
    for (double side : {1.0, -1.0}) {
      const double x3 = side * cfg.b + cfg.L * d + g;
      ASSERT_NEAR(saturation_variable(x3, d, cfg, p), side * cfg.b, 1e-12);
      EXPECT_NEAR(g + side * cfg.b, x3 - cfg.L * d, 1e-12);

      const auto outer = side > 0 ? FBranch::Upper : FBranch::Lower;
      const double jump = F_integral(s, x3, outer, cfg, p) -
                          F_integral(s, x3, FBranch::Interior, cfg, p);
      const double expected = test::simpson64(
          [&](double xi) { return test::g_direct(xi, p); }, 0.0, d) -
          d * g - 0.5 * cfg.L * d * d;
      EXPECT_NEAR(jump, expected, 5e-8);
    }
  }
  const double x3 = cfg.b;
  EXPECT_NEAR(F_integral({0.0, 0.0}, x3, FBranch::Upper, cfg, p) -
                  F_integral({0.0, 0.0}, x3, FBranch::Interior, cfg, p),
              0.0, 1e-9);
}

TEST(FiniteDifference, ExactOnQuadratics) {
  std::vector<double> t, v;
  for (int i = 0; i <= 10; ++i) {
    t.push_back(0.1 * i);
    v.push_back(3.0 * t.back() * t.back() - t.back() + 2.0);
  }
  const auto d = finite_difference(t, v);
  ASSERT_EQ(d.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(d[i], 6.0 * t[i] - 1.0, 1e-10);
  }
  const auto samples = lyapunov_samples(t, v);
  ASSERT_EQ(samples.size(), t.size());
  EXPECT_DOUBLE_EQ(samples[4].t, t[4]);
  EXPECT_DOUBLE_EQ(samples[4].value, v[4]);
  EXPECT_NEAR(samples[4].derivative_estimate, 6.0 * t[4] - 1.0, 1e-10);
}

TEST(CheckDissipation, Examples) {
  std::vector<double> t, constant, ramp, zero;
  for (int i = 0; i < 100; ++i) {
    t.push_back(1e-3 * i);
    constant.push_back(0.7);
    ramp.push_back(t.back());
    zero.push_back(0.0);
  }
  const auto ok = check_dissipation(t, constant, zero, 1e-4);
  EXPECT_TRUE(ok.passed);
  EXPECT_EQ(ok.max_violation, 0.0);
  EXPECT_EQ(ok.compared, 98u);

  const auto bad = check_dissipation(t, ramp, zero, 1e-4);
  EXPECT_FALSE(bad.passed);
  EXPECT_NEAR(bad.max_violation, 1.0, 1e-9);
  EXPECT_EQ(bad.violation_times.size(), 98u);

  // The supply can pay for the increase.
  std::vector<double> one(t.size(), 1.0);
  EXPECT_TRUE(check_dissipation(t, ramp, one, 1e-4).passed);

  const std::vector<std::size_t> all_but_none = [&] {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < t.size(); ++i) v.push_back(i);
    return v;
  }();
  const auto skipped = check_dissipation(t, ramp, zero, 1e-4, all_but_none);
  EXPECT_TRUE(skipped.passed);
  EXPECT_EQ(skipped.compared, 0u);
}

TEST(CheckDissipation, Errors) {
  const std::vector<double> t{0.0, 1.0, 2.0};
  const std::vector<double> short_series{0.0, 1.0};
  EXPECT_THROW(check_dissipation(t, t, short_series, 1e-4), std::invalid_argument);
  EXPECT_THROW(check_dissipation(short_series, short_series, short_series, 1e-4),
               std::invalid_argument);
}

TEST_F(NniTest, PlantDissipationAlongUncontrolledRun) {
  const auto traj = simulate({0.4, 0.0, 10.0}, std::nullopt, p);
  const auto r = check_dissipation(traj, series_V1(traj),
                                   series_plant_supply(traj));
  EXPECT_TRUE(r.passed) << r.max_violation;
  EXPECT_EQ(r.compared, traj.size() - 2);
}

TEST_F(NniTest, ControllerDissipationAlongClosedLoop) {
  for (double b : {0.2, 0.3, kUnbounded}) {
    const auto traj = simulate(test::reference_fault(), test::reference_controller(b), p);
    const auto r = check_dissipation(traj, series_V3(traj),
                                     series_controller_supply(traj));
    EXPECT_TRUE(r.passed) << "b=" << b << " violation " << r.max_violation;
    const auto plant = check_dissipation(traj, series_V1(traj),
                                         series_plant_supply(traj));
    EXPECT_TRUE(plant.passed) << "b=" << b << " violation " << plant.max_violation;
  }
}

TEST_F(NniTest, SwitchExclusionCoversNeighbours) {
  const auto traj = simulate(test::reference_fault(), test::reference_controller(0.3), p);
  const auto switches = traj.mode_switches();
  ASSERT_FALSE(switches.empty());
  const auto ex = switch_exclusion(traj);
  for (std::size_t i : switches) {
    for (std::size_t j : {i - 1, i, i + 1}) {
      EXPECT_NE(std::find(ex.begin(), ex.end(), j), ex.end()) << j;
    }
  }
}

TEST_F(NniTest, LyapunovPositiveAwayFromOrigin) {
  for (double b : {0.2, 0.3, kUnbounded}) {
    const auto traj = simulate(test::reference_fault(), test::reference_controller(b), p);
    EXPECT_GT(min_lyapunov_off_origin(traj), 0.0) << "b=" << b;
  }
  const auto rest = simulate({p.delta_bar, 0.0, 1.0}, std::nullopt, p);
  EXPECT_TRUE(std::isnan(min_lyapunov_off_origin(rest)));
}

}  // namespace
}  // namespace smib
