#include "smib/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace smib {

const char* to_string(OutputKind kind) {
  switch (kind) {
    case OutputKind::Csv:
      return "csv";
    case OutputKind::Plot:
      return "plot";
    case OutputKind::Report:
      break;
  }
  return "report";
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Delta0:
      return "delta0";
    case SweepAxis::DeltaDot0:
      return "delta_dot0";
    case SweepAxis::B:
      return "b";
    case SweepAxis::K:
      return "K";
    case SweepAxis::L:
      break;
  }
  return "L";
}

bool ScenarioFile::wants(OutputKind kind) const {
  for (auto k : outputs) {
    if (k == kind) return true;
  }
  return false;
}

double parse_number_or_inf(const std::string& text) {
  if (text == "inf" || text == ".inf" || text == "+inf" || text == "+.inf" ||
      text == "Inf" || text == ".Inf") {
    return kUnbounded;
  }
  if (text.empty()) throw ConfigError("empty numeric value");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ConfigError("not a number: '" + text + "'");
  }
  return v;
}

namespace {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError("section '" + section + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + section + "." + key + "'");
    }
  }
}

double number_at(const YAML::Node& node, const std::string& section,
                 const std::string& key, bool allow_inf = false) {
  const YAML::Node v = node[key];
  if (!v) throw ConfigError("missing required key '" + section + "." + key + "'");
  if (!v.IsScalar()) {
    throw ConfigError("key '" + section + "." + key + "' must be a scalar");
  }
  double x = 0.0;
  try {
    x = parse_number_or_inf(v.Scalar());
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + section + "." + key + "': " + e.what());
  }
  if (!allow_inf && !std::isfinite(x)) {
    throw ConfigError("key '" + section + "." + key + "' must be finite");
  }
  return x;
}

double number_or(const YAML::Node& node, const std::string& section,
                 const std::string& key, double fallback) {
  return node[key] ? number_at(node, section, key) : fallback;
}

template <class F>
auto revalidate(const std::string& section, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid " + section + ": " + e.what());
  }
}

SmibParams parse_plant(const YAML::Node& node) {
  check_keys(node, "plant",
             {"H", "f0", "omega0", "D", "p_mech", "p_max", "p_storage_bar",
              "M"});
  const double H = number_at(node, "plant", "H");
  const double p_mech = number_at(node, "plant", "p_mech");
  const double p_max = number_at(node, "plant", "p_max");
  const double D = number_or(node, "plant", "D", 0.0);
  const double p_st = number_or(node, "plant", "p_storage_bar", 0.0);
  if (node["f0"] && node["omega0"]) {
    throw ConfigError("keys 'plant.f0' and 'plant.omega0' are exclusive");
  }
  const double omega0 =
      node["omega0"] ? number_at(node, "plant", "omega0")
                     : 2.0 * std::numbers::pi * number_or(node, "plant", "f0", 50.0);
  return revalidate("plant", [&] {
    SmibParams p;
    p.H = H;
    p.omega0 = omega0;
    p.M = node["M"] ? number_at(node, "plant", "M") : 2.0 * H / omega0;
    p.D = D;
    p.p_mech = p_mech;
    p.p_max = p_max;
    p.p_storage_bar = p_st;
    p.delta_bar = equilibrium_angle(p_mech + p_st, p_max);
    p.validate();
    return p;
  });
}

FaultScenario parse_fault(const YAML::Node& node) {
  check_keys(node, "fault", {"delta0", "delta_dot0", "horizon"});
  FaultScenario f;
  f.delta0 = number_at(node, "fault", "delta0");
  f.delta_dot0 = number_or(node, "fault", "delta_dot0", 0.0);
  f.horizon = number_or(node, "fault", "horizon", 20.0);
  revalidate("fault", [&] { f.validate(); return 0; });
  return f;
}

ControllerConfig parse_controller(const YAML::Node& node) {
  check_keys(node, "controller",
             {"tau", "K", "L", "alpha", "b", "hysteresis"});
  ControllerConfig c;
  c.tau = number_at(node, "controller", "tau");
  c.K = number_at(node, "controller", "K");
  c.L = number_at(node, "controller", "L");
  c.alpha = number_at(node, "controller", "alpha");
  c.b = number_at(node, "controller", "b", /*allow_inf=*/true);
  c.hysteresis = number_or(node, "controller", "hysteresis", 0.0);
  revalidate("controller", [&] { c.validate(); return 0; });
  return c;
}

SimulationConfig parse_sim(const YAML::Node& node) {
  check_keys(node, "sim", {"dt", "record_stride", "horizon"});
  SimulationConfig s;
  s.dt = number_or(node, "sim", "dt", s.dt);
  if (node["horizon"]) s.horizon = number_at(node, "sim", "horizon");
  if (node["record_stride"]) {
    const double stride = number_at(node, "sim", "record_stride");
    if (stride < 1.0 || stride != std::floor(stride) || stride > 1e9) {
      throw ConfigError("key 'sim.record_stride' must be an integer >= 1");
    }
    s.record_stride = static_cast<int>(stride);
  }
  return s;
}

std::vector<OutputKind> parse_outputs(const YAML::Node& node) {
  if (!node.IsSequence()) throw ConfigError("'outputs' must be a list");
  std::vector<OutputKind> out;
  for (const auto& item : node) {
    const auto name = item.as<std::string>();
    if (name == "csv") {
      out.push_back(OutputKind::Csv);
    } else if (name == "plot") {
      out.push_back(OutputKind::Plot);
    } else if (name == "report") {
      out.push_back(OutputKind::Report);
    } else {
      throw ConfigError("unknown output kind '" + name + "'");
    }
  }
  return out;
}

ScenarioFile scenario_from_node(const YAML::Node& root) {
  check_keys(root, "scenario", {"plant", "fault", "controller", "sim", "outputs"});
  if (!root["plant"]) throw ConfigError("missing required section 'plant'");
  if (!root["fault"]) throw ConfigError("missing required section 'fault'");
  ScenarioFile s;
  s.plant = parse_plant(root["plant"]);
  s.fault = parse_fault(root["fault"]);
  if (root["controller"] && !root["controller"].IsNull()) {
    s.controller = parse_controller(root["controller"]);
  }
  if (root["sim"]) s.sim = parse_sim(root["sim"]);
  if (root["outputs"]) s.outputs = parse_outputs(root["outputs"]);
  revalidate("sim", [&] { s.sim.validate(s.horizon()); return 0; });
  return s;
}

YAML::Node load_yaml(const std::string& text) {
  try {
    YAML::Node root = YAML::Load(text);
    if (!root.IsMap()) throw ConfigError("top level must be a mapping");
    return root;
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
  try {
    return scenario_from_node(load_yaml(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path));
}

std::string emit_scenario(const ScenarioFile& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "plant" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "H" << YAML::Value << format_number(s.plant.H);
  out << YAML::Key << "omega0" << YAML::Value << format_number(s.plant.omega0);
  out << YAML::Key << "M" << YAML::Value << format_number(s.plant.M);
  out << YAML::Key << "D" << YAML::Value << format_number(s.plant.D);
  out << YAML::Key << "p_mech" << YAML::Value << format_number(s.plant.p_mech);
  out << YAML::Key << "p_max" << YAML::Value << format_number(s.plant.p_max);
  out << YAML::Key << "p_storage_bar" << YAML::Value
      << format_number(s.plant.p_storage_bar);
  out << YAML::EndMap;

  out << YAML::Key << "fault" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "delta0" << YAML::Value << format_number(s.fault.delta0);
  out << YAML::Key << "delta_dot0" << YAML::Value
      << format_number(s.fault.delta_dot0);
  out << YAML::Key << "horizon" << YAML::Value << format_number(s.fault.horizon);
  out << YAML::EndMap;

  if (s.controller) {
    const auto& c = *s.controller;
    out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "tau" << YAML::Value << format_number(c.tau);
    out << YAML::Key << "K" << YAML::Value << format_number(c.K);
    out << YAML::Key << "L" << YAML::Value << format_number(c.L);
    out << YAML::Key << "alpha" << YAML::Value << format_number(c.alpha);
    out << YAML::Key << "b" << YAML::Value << format_number(c.b);
    out << YAML::Key << "hysteresis" << YAML::Value
        << format_number(c.hysteresis);
    out << YAML::EndMap;
  }

  out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << format_number(s.sim.dt);
  out << YAML::Key << "record_stride" << YAML::Value << s.sim.record_stride;
  if (s.sim.horizon) {
    out << YAML::Key << "horizon" << YAML::Value << format_number(*s.sim.horizon);
  }
  out << YAML::EndMap;

  out << YAML::Key << "outputs" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto k : s.outputs) out << to_string(k);
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ScenarioFile SweepSpec::point(double value) const {
  ScenarioFile s = base;
  switch (axis) {
    case SweepAxis::Delta0:
      s.fault.delta0 = value;
      break;
    case SweepAxis::DeltaDot0:
      s.fault.delta_dot0 = value;
      break;
    case SweepAxis::B:
      s.controller->b = value;
      break;
    case SweepAxis::K:
      s.controller->K = value;
      break;
    case SweepAxis::L:
      s.controller->L = value;
      break;
  }
  return s;
}

namespace {

SweepSpec sweep_from_text(const std::string& text,
                          const std::filesystem::path& base_dir) {
  const YAML::Node root = load_yaml(text);
  check_keys(root, "sweep file", {"sweep", "base", "base_file"});
  const YAML::Node sweep = root["sweep"];
  if (!sweep) throw ConfigError("missing required section 'sweep'");
  check_keys(sweep, "sweep", {"axis", "values", "grid"});

  SweepSpec spec;
  if (!sweep["axis"]) throw ConfigError("missing required key 'sweep.axis'");
  const auto axis = sweep["axis"].as<std::string>();
  if (axis == "delta0") {
    spec.axis = SweepAxis::Delta0;
  } else if (axis == "delta_dot0") {
    spec.axis = SweepAxis::DeltaDot0;
  } else if (axis == "b") {
    spec.axis = SweepAxis::B;
  } else if (axis == "K") {
    spec.axis = SweepAxis::K;
  } else if (axis == "L") {
    spec.axis = SweepAxis::L;
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }

  const bool has_values = static_cast<bool>(sweep["values"]);
  const bool has_grid = static_cast<bool>(sweep["grid"]);
  if (has_values == has_grid) {
    throw ConfigError("sweep needs exactly one of 'sweep.values' or 'sweep.grid'");
  }
  if (has_values) {
    const YAML::Node values = sweep["values"];
    if (!values.IsSequence()) throw ConfigError("'sweep.values' must be a list");
    for (const auto& v : values) {
      spec.values.push_back(parse_number_or_inf(v.Scalar()));
    }
  } else {
    const YAML::Node grid = sweep["grid"];
    check_keys(grid, "sweep.grid", {"start", "stop", "count"});
    const double start = number_at(grid, "sweep.grid", "start");
    const double stop = number_at(grid, "sweep.grid", "stop");
    const double count = number_at(grid, "sweep.grid", "count");
    if (count < 1.0 || count != std::floor(count) || count > 1e7) {
      throw ConfigError("key 'sweep.grid.count' must be an integer >= 1");
    }
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < n; ++i) {
      spec.values.push_back(n == 1 ? start
                                   : start + (stop - start) *
                                                 static_cast<double>(i) /
                                                 static_cast<double>(n - 1));
    }
  }
  if (spec.values.empty()) throw ConfigError("sweep grid is empty");
  for (double v : spec.values) {
    if (std::isnan(v) || (std::isinf(v) && spec.axis != SweepAxis::B)) {
      throw ConfigError("sweep values must be finite");
    }
  }

  if (root["base"] && root["base_file"]) {
    throw ConfigError("keys 'base' and 'base_file' are exclusive");
  }
  if (root["base"]) {
    spec.base = scenario_from_node(root["base"]);
  } else if (root["base_file"]) {
    spec.base = load_scenario(base_dir / root["base_file"].as<std::string>());
  } else {
    throw ConfigError("missing required section 'base'");
  }
  const bool controller_axis = spec.axis == SweepAxis::B ||
                               spec.axis == SweepAxis::K ||
                               spec.axis == SweepAxis::L;
  if (controller_axis && !spec.base.controller) {
    throw ConfigError("sweep axis '" + axis +
                      "' requires a 'controller' section in the base scenario");
  }
  return spec;
}

}  // namespace

SweepSpec parse_sweep(const std::string& text,
                      const std::filesystem::path& base_dir) {
  try {
    return sweep_from_text(text, base_dir);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed sweep: ") + e.what());
  }
}

SweepSpec load_sweep(const std::filesystem::path& path) {
  return parse_sweep(read_file(path), path.parent_path());
}

}  // namespace smib
