#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "smib/controllers.hpp"
#include "smib/model.hpp"
#include "smib/simulation.hpp"

namespace smib::test {

// Plant of the reference case: H = 4 s, 50 Hz, undamped, P_M = 0.8, P_max = 1.
inline SmibParams reference_plant(double D = 0.0) {
  return SmibParams::from_operating_point(4.0, 50.0, D, 0.8, 1.0);
}

inline ControllerConfig reference_controller(double b) {
  ControllerConfig c;
  c.tau = 0.1;
  c.K = 1.0;
  c.L = 1.1;
  c.alpha = 1.0;
  c.b = b;
  return c;
}

inline FaultScenario reference_fault(double delta0 = 0.2) {
  return {delta0, 0.0, 20.0};
}

// Composite Simpson rule with 64 panels. Independent of the closed forms it
// is used to check.
template <class F>
double simpson64(F&& f, double a, double b) {
  constexpr int n = 64;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Reference g written out directly from the sine law.
inline double g_direct(double xi, const SmibParams& p) {
  return p.p_max * std::sin(p.delta_bar) - p.p_max * std::sin(xi + p.delta_bar);
}

}  // namespace smib::test
