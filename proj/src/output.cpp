#include "smib/output.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smib/nni_analysis.hpp"

namespace smib {

std::string format_sig9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void emit_optional(YAML::Emitter& e, const std::optional<double>& v) {
  if (v) {
    e << format_sig9(*v);
  } else {
    e << YAML::Null;
  }
}

void emit_optional(YAML::Emitter& e, const std::optional<bool>& v) {
  if (v) {
    e << *v;
  } else {
    e << YAML::Null;
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// 1-2-5 tick spacing giving roughly `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
  return step * mag;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryCsvHeader << '\n';
  const auto lyap = series_lyapunov(traj);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.samples[i];
    out << format_sig9(s.t) << ',' << format_sig9(s.plant.delta_tilde) << ','
        << format_sig9(s.plant.delta_tilde_dot) << ','
        << format_sig9(s.ctrl.x3) << ',' << format_sig9(s.w) << ','
        << format_sig9(s.p_battery) << ',' << to_string(s.ctrl.mode) << ','
        << format_sig9(lyap[i]) << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj) {
  auto out = open_for_write(path);
  write_trajectory_csv(out, traj);
}

void write_report(std::ostream& out, const StabilityReport& r,
                  const Trajectory& traj) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "eac_margin" << YAML::Value << format_sig9(r.eac_margin);
  e << YAML::Key << "eac_predicts_stable" << YAML::Value << (r.eac_margin < 0.0);
  e << YAML::Key << "c_max" << YAML::Value << format_sig9(r.c_max);
  e << YAML::Key << "level" << YAML::Value << format_sig9(r.level);
  e << YAML::Key << "initial_W" << YAML::Value << format_sig9(r.initial_W);
  e << YAML::Key << "in_omega" << YAML::Value << r.in_omega;
  e << YAML::Key << "q1_positive_definite" << YAML::Value;
  emit_optional(e, r.q1_positive_definite);
  e << YAML::Key << "q2_negative_semidefinite" << YAML::Value;
  emit_optional(e, r.q2_negative_semidefinite);
  e << YAML::Key << "design_condition_K_lt_L" << YAML::Value;
  emit_optional(e, r.design_condition);
  e << YAML::Key << "empirical" << YAML::Value << to_string(r.empirical);
  e << YAML::Key << "empirical_stable" << YAML::Value << r.empirical_stable;
  e << YAML::Key << "empirical_converged" << YAML::Value
    << r.empirical_converged;
  e << YAML::Key << "saturation_exit_time" << YAML::Value;
  emit_optional(e, r.saturation_exit_time);
  e << YAML::Key << "diverged" << YAML::Value << r.diverged;
  e << YAML::Key << "divergence_time" << YAML::Value;
  emit_optional(e, traj.metadata.divergence_time);
  e << YAML::Key << "samples" << YAML::Value << traj.size();
  e << YAML::Key << "horizon" << YAML::Value
    << format_sig9(traj.metadata.horizon);
  e << YAML::EndMap;
  out << e.c_str() << '\n';
}

void write_report(const std::filesystem::path& path, const StabilityReport& r,
                  const Trajectory& traj) {
  auto out = open_for_write(path);
  write_report(out, r, traj);
}

std::string render_svg(const PlotSpec& spec) {
  constexpr double kLeft = 72, kRight = 150, kTop = 40, kBottom = 56;
  const double w = spec.width, h = spec.height;
  const double pw = w - kLeft - kRight, ph = h - kTop - kBottom;

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = -1, ymax = 1;
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
    << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" "
    << "font-size=\"14\">" << xml_escape(spec.title) << "</text>\n";

  const double xs = nice_step(xmax - xmin, 8), ys = nice_step(ymax - ymin, 6);
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
    o << "<line x1=\"" << px(t) << "\" y1=\"" << kTop << "\" x2=\"" << px(t)
      << "\" y2=\"" << kTop + ph << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 16
      << "\" text-anchor=\"middle\">" << format_sig9(std::abs(t) < 1e-12 * xs ? 0.0 : t)
      << "</text>\n";
  }
  for (double v = std::ceil(ymin / ys) * ys; v <= ymax + 1e-9 * ys; v += ys) {
    o << "<line x1=\"" << kLeft << "\" y1=\"" << py(v) << "\" x2=\""
      << kLeft + pw << "\" y2=\"" << py(v) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(v) + 4
      << "\" text-anchor=\"end\">" << format_sig9(std::abs(v) < 1e-12 * ys ? 0.0 : v)
      << "</text>\n";
  }
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
    << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << h - 14
    << "\" text-anchor=\"middle\">" << xml_escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << kTop + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(spec.y_label)
    << "</text>\n";

  static constexpr std::array<const char*, 6> kColors{
      "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t step = std::max<std::size_t>(1, n / 4000);
    o << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\""
      << kColors[k % kColors.size()] << "\" points=\"";
    for (std::size_t i = 0; i < n; i += step) {
      if (!std::isfinite(s.y[i])) continue;
      o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    if (n > 0 && (n - 1) % step != 0 && std::isfinite(s.y[n - 1])) {
      o << px(s.x[n - 1]) << ',' << py(s.y[n - 1]);
    }
    o << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\""
      << kLeft + pw + 36 << "\" y2=\"" << ly << "\" stroke-width=\"2\" stroke=\""
      << kColors[k % kColors.size()] << "\"/>\n";
    o << "<text x=\"" << kLeft + pw + 42 << "\" y=\"" << ly + 4 << "\">"
      << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::filesystem::path& path, const PlotSpec& spec) {
  auto out = open_for_write(path);
  out << render_svg(spec);
}

PlotSeries angle_series(const Trajectory& traj, std::string label) {
  PlotSeries s{std::move(label), {}, {}};
  for (const auto& p : traj.samples) {
    s.x.push_back(p.t);
    s.y.push_back(p.plant.delta_tilde);
  }
  return s;
}

PlotSeries battery_series(const Trajectory& traj, std::string label) {
  PlotSeries s{std::move(label), {}, {}};
  for (const auto& p : traj.samples) {
    s.x.push_back(p.t);
    s.y.push_back(p.p_battery);
  }
  return s;
}

}  // namespace smib
