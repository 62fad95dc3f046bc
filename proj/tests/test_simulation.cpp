#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <bit>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "smib/nni_analysis.hpp"
#include "smib/simulation.hpp"
#include "support.hpp"

namespace smib {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Rk4, Examples) {
  const std::array<double, 2> x{1.5, -2.0};
  const auto same = rk4_step(x, [](const auto&) { return std::array<double, 2>{}; }, 0.1);
  EXPECT_EQ(same, x);
  const auto decay = rk4_step(std::array<double, 1>{1.0},
                              [](const auto& v) { return std::array<double, 1>{-v[0]}; },
                              0.1);
  EXPECT_NEAR(decay[0], 0.904837, 1e-6);
  EXPECT_NEAR(decay[0], std::exp(-0.1), 1e-7);
}

TEST(Simulate, EquilibriumStaysPut) {
  const auto p = test::reference_plant();
  const auto traj = simulate({p.delta_bar, 0.0, 5.0}, std::nullopt, p);
  ASSERT_EQ(traj.size(), 5001u);
  for (const auto& s : traj.samples) {
    EXPECT_NEAR(s.plant.delta_tilde, 0.0, 1e-15);
    EXPECT_NEAR(s.plant.delta_tilde_dot, 0.0, 1e-12);
  }
}

TEST(Simulate, UncontrolledReferenceCaseLosesSynchronism) {
  const auto p = test::reference_plant();
  const auto traj = simulate(test::reference_fault(), std::nullopt, p);
  double peak = 0.0;
  for (const auto& s : traj.samples) peak = std::max(peak, std::abs(s.plant.delta_tilde));
  EXPECT_GT(peak, kPi);
  EXPECT_TRUE(traj.metadata.diverged);
  ASSERT_TRUE(traj.metadata.divergence_time.has_value());
  EXPECT_LT(*traj.metadata.divergence_time, 20.0);
  EXPECT_LT(traj.size(), 20001u);
}

TEST(Simulate, UnboundedControllerConverges) {
  const auto p = test::reference_plant();
  const auto traj = simulate(test::reference_fault(), test::reference_controller(kUnbounded), p);
  EXPECT_FALSE(traj.metadata.diverged);
  EXPECT_LT(std::abs(traj.samples.back().plant.delta_tilde), 0.01);
  for (const auto& s : traj.samples) EXPECT_EQ(s.ctrl.mode, ControlMode::Linear);
}

TEST(Simulate, InitialState) {
  const auto p = test::reference_plant();
  const auto traj = simulate({0.3, 0.7, 1.0}, test::reference_controller(0.2), p);
  const auto& s0 = traj.samples.front();
  EXPECT_EQ(s0.t, 0.0);
  EXPECT_DOUBLE_EQ(s0.plant.delta_tilde, 0.3 - p.delta_bar);
  EXPECT_EQ(s0.plant.delta_tilde_dot, 0.7);
  EXPECT_EQ(s0.ctrl.x3, 0.0);
}

TEST(Simulate, RecordInvariants) {
  const auto p = test::reference_plant();
  for (double b : {0.0, 0.2, 0.3, kUnbounded}) {
    const auto cfg = test::reference_controller(b);
    const auto traj = simulate(test::reference_fault(), cfg, p);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const auto& s = traj.samples[i];
      EXPECT_DOUBLE_EQ(s.t, i * traj.dt);
      EXPECT_EQ(s.p_battery, sat(s.w, b));
      EXPECT_EQ(s.ctrl.mode, mode_for(s.w, b));
      EXPECT_NEAR(s.w, saturation_variable(s.ctrl.x3, s.plant.delta_tilde, cfg, p), 1e-15);
      EXPECT_LE(std::abs(s.p_battery), b);
    }
  }
}

TEST(Simulate, Stride) {
  const auto p = test::reference_plant();
  SimulationConfig sim;
  sim.record_stride = 10;
  const auto coarse = simulate({0.4, 0.0, 2.0}, std::nullopt, p, sim);
  const auto fine = simulate({0.4, 0.0, 2.0}, std::nullopt, p);
  ASSERT_EQ(coarse.size(), 201u);
  EXPECT_DOUBLE_EQ(coarse.dt, 0.01);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    EXPECT_EQ(coarse.samples[i].plant, fine.samples[10 * i].plant);
  }
}

TEST(Simulate, HorizonOverride) {
  const auto p = test::reference_plant();
  SimulationConfig sim;
  sim.horizon = 1.5;
  const auto traj = simulate({0.4, 0.0, 20.0}, std::nullopt, p, sim);
  EXPECT_EQ(traj.size(), 1501u);
  EXPECT_DOUBLE_EQ(traj.metadata.horizon, 1.5);
  EXPECT_DOUBLE_EQ(traj.samples.back().t, 1.5);
}

TEST(Simulate, RejectsInvalidConfig) {
  const auto p = test::reference_plant();
  SimulationConfig sim;
  sim.dt = 0.0;
  EXPECT_THROW(simulate({0.4, 0.0, 1.0}, std::nullopt, p, sim), std::invalid_argument);
  sim = {};
  sim.record_stride = 0;
  EXPECT_THROW(simulate({0.4, 0.0, 1.0}, std::nullopt, p, sim), std::invalid_argument);
  sim = {};
  sim.dt = 2.0;
  EXPECT_THROW(simulate({0.4, 0.0, 1.0}, std::nullopt, p, sim), std::invalid_argument);
  auto cfg = test::reference_controller(0.2);
  cfg.tau = -1.0;
  EXPECT_THROW(simulate({0.4, 0.0, 1.0}, cfg, p), std::invalid_argument);
}

TEST(Simulate, Deterministic) {
  const auto p = test::reference_plant();
  const auto a = simulate(test::reference_fault(), test::reference_controller(0.2), p);
  const auto b = simulate(test::reference_fault(), test::reference_controller(0.2), p);
  ASSERT_EQ(a.size(), b.size());
  auto bits = [](double v) { return std::bit_cast<std::uint64_t>(v); };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.samples[i];
    const auto& y = b.samples[i];
    ASSERT_EQ(bits(x.t), bits(y.t));
    ASSERT_EQ(bits(x.plant.delta_tilde), bits(y.plant.delta_tilde));
    ASSERT_EQ(bits(x.plant.delta_tilde_dot), bits(y.plant.delta_tilde_dot));
    ASSERT_EQ(bits(x.ctrl.x3), bits(y.ctrl.x3));
    ASSERT_EQ(bits(x.w), bits(y.w));
    ASSERT_EQ(bits(x.p_battery), bits(y.p_battery));
    ASSERT_EQ(x.ctrl.mode, y.ctrl.mode);
  }
}

TEST(Simulate, ZeroBoundMatchesUncontrolledPlant) {
  const auto p = test::reference_plant();
  FaultScenario f{0.4, 0.0, 10.0};
  const auto open = simulate(f, std::nullopt, p);
  const auto zero = simulate(f, test::reference_controller(0.0), p);
  ASSERT_EQ(open.size(), zero.size());
  for (std::size_t i = 0; i < open.size(); ++i) {
    EXPECT_EQ(open.samples[i].plant, zero.samples[i].plant);
    EXPECT_EQ(zero.samples[i].ctrl.mode, ControlMode::Saturated);
    EXPECT_EQ(zero.samples[i].p_battery, 0.0);
  }
}

TEST(Simulate, EnergyDrift) {
  const auto p = test::reference_plant();
  const auto traj = simulate({0.4, 0.0, 20.0}, std::nullopt, p);
  const auto w = series_lyapunov(traj);
  double drift = 0.0;
  for (double v : w) drift = std::max(drift, std::abs(v - w.front()));
  EXPECT_LE(drift, 1e-6 * std::max(w.front(), 1.0));
}

TEST(Simulate, SmallSignalFrequency) {
  const auto p = test::reference_plant();
  const double expected = std::sqrt(p.p_max * std::cos(p.delta_bar) / p.M);
  EXPECT_NEAR(expected, 4.854065, 1e-6);
  const auto traj = simulate({p.delta_bar + 1e-4, 0.0, 10.0}, std::nullopt, p);
  std::vector<double> crossings;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double a = traj.samples[i - 1].plant.delta_tilde;
    const double b = traj.samples[i].plant.delta_tilde;
    if ((a < 0.0) != (b < 0.0)) {
      const double ta = traj.samples[i - 1].t;
      crossings.push_back(ta + traj.dt * a / (a - b));
    }
  }
  ASSERT_GE(crossings.size(), 4u);
  const double half_period =
      (crossings.back() - crossings.front()) / (crossings.size() - 1);
  EXPECT_NEAR(kPi / half_period, expected, 0.005 * expected);
}

TEST(Simulate, FourthOrderConvergence) {
  const auto p = test::reference_plant();
  const FaultScenario f{0.4, 0.0, 5.0};
  SimulationConfig ref_sim;
  ref_sim.dt = 1e-5;
  const auto ref = simulate(f, std::nullopt, p, ref_sim);
  auto error = [&](double dt) {
    SimulationConfig sim;
    sim.dt = dt;
    const auto t = simulate(f, std::nullopt, p, sim);
    const int stride = static_cast<int>(std::lround(dt / ref_sim.dt));
    double e = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& r = ref.samples[i * stride].plant;
      e = std::max(e, std::abs(t.samples[i].plant.delta_tilde - r.delta_tilde));
    }
    return e;
  };
  const double e4 = error(4e-3), e2 = error(2e-3), e1 = error(1e-3);
  EXPECT_GT(e4 / e2, 8.0);
  EXPECT_LT(e4 / e2, 32.0);
  EXPECT_GT(e2 / e1, 8.0);
  EXPECT_LT(e2 / e1, 32.0);
}

TEST(SaturationExit, Examples) {
  const auto p = test::reference_plant();
  const auto unbounded = simulate(test::reference_fault(), test::reference_controller(kUnbounded), p);
  EXPECT_EQ(detect_saturation_exit(unbounded, kUnbounded), 0.0);

  for (double b : {0.2, 0.3}) {
    const auto traj = simulate(test::reference_fault(), test::reference_controller(b), p);
    const auto exit = detect_saturation_exit(traj, b);
    ASSERT_TRUE(exit.has_value()) << b;
    EXPECT_GT(*exit, 0.0);
    EXPECT_LT(*exit, 20.0);
    for (const auto& s : traj.samples) {
      if (s.t > *exit) EXPECT_EQ(s.ctrl.mode, ControlMode::Linear);
    }
  }

  Trajectory stuck;
  stuck.dt = 0.1;
  for (int i = 0; i < 10; ++i) {
    TrajectorySample s;
    s.t = 0.1 * i;
    s.w = 0.5;
    s.p_battery = 0.2;
    s.ctrl.mode = ControlMode::Saturated;
    stuck.samples.push_back(s);
  }
  EXPECT_FALSE(detect_saturation_exit(stuck, 0.2).has_value());
}

TEST(Trajectory, ModeSwitches) {
  const auto p = test::reference_plant();
  const auto traj = simulate(test::reference_fault(), test::reference_controller(0.3), p);
  const auto sw = traj.mode_switches();
  ASSERT_FALSE(sw.empty());
  for (std::size_t i : sw) {
    EXPECT_NE(traj.samples[i].ctrl.mode, traj.samples[i - 1].ctrl.mode);
  }
  EXPECT_EQ(traj.times().size(), traj.size());
}

}  // namespace
}  // namespace smib
