#include "stirap/config.hpp"

#include "stirap/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace stirap {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Trajectory: return "trajectory";
    case ExperimentKind::PlCompare: return "pl-compare";
    case ExperimentKind::BerrySweep: return "berry-sweep";
    case ExperimentKind::StarkSweep: return "stark-sweep";
    case ExperimentKind::VisibilityMap: return "visibility-map";
    case ExperimentKind::NoiseRobustness: return "noise-robustness";
    case ExperimentKind::ScheduleDump: return "schedule-dump";
  }
  return "?";
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> kinds = {
      ExperimentKind::Trajectory,    ExperimentKind::PlCompare,       ExperimentKind::BerrySweep,
      ExperimentKind::StarkSweep,    ExperimentKind::VisibilityMap,   ExperimentKind::NoiseRobustness,
      ExperimentKind::ScheduleDump,
  };
  return kinds;
}

ExperimentKind parse_experiment(std::string_view name) {
  for (ExperimentKind k : all_experiments()) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown experiment '{}'", name));
}

LambdaParams ExperimentConfig::effective_params() const {
  return dissipation ? lambda : lambda.without_dissipation();
}

namespace {

std::vector<double> range(double start, double step, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(start + step * i);
  return v;
}

}  // namespace

ExperimentConfig preset(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::Trajectory:
      c.sweep.wedge_deg = range(0.0, 30.0, 12);
      break;
    case ExperimentKind::PlCompare:
      c.integration.record_every_ns = 1.0;
      break;
    case ExperimentKind::BerrySweep:
      c.sweep.wedge_deg = range(0.0, 30.0, 12);
      c.sweep.loops = {1};
      break;
    case ExperimentKind::StarkSweep:
      c.sweep.delta_mhz = {-0.4, -0.2, 0.0, 0.2, 0.4};
      c.sweep.tau_ns = {1600.0, 2400.0, 3200.0, 4000.0};
      c.sweep.rabi_mhz = {20.0, 31.0, 64.0};
      break;
    case ExperimentKind::VisibilityMap:
      c.schedule.echo = true;
      c.schedule.loops = 2;
      c.sweep.tau_ns = {25.0, 50.0, 100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0, 12800.0};
      c.sweep.rabi_mhz = {20.0, 31.0, 64.0};
      c.sweep.wedge_deg = {0.0, 90.0, 180.0, 270.0};
      break;
    case ExperimentKind::NoiseRobustness:
      c.schedule.loop.shape = PulseShape::SquareDwell;
      c.schedule.loop.dwell_fraction = 0.0;
      c.schedule.echo = true;
      c.schedule.loops = 2;
      c.readout = ReadoutMode::Sampled;
      c.sweep.s_phi_deg = {0.0, 4.0, 8.0, 14.0, 22.0};
      c.sweep.s_theta_deg = {0.0, 8.0, 14.0, 22.0};
      c.sweep.tau_ns = {1200.0};
      c.sweep.wedge_deg = {120.0};
      break;
    case ExperimentKind::ScheduleDump:
      break;
  }
  return c;
}

namespace {

struct Key {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(fmt::format("'{}' is not a number", text));
  }
  return v;
}

template <typename Int>
Int to_int(const std::string& text) {
  const std::string t = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(fmt::format("'{}' is not an integer", text));
  }
  return v;
}

bool to_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(fmt::format("'{}' is not a boolean", text));
}

double to_time(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "none") return kNoDissipation;
  return to_double(t);
}

template <typename T, typename Parse>
std::vector<T> to_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) throw ConfigError(fmt::format("empty entry in list '{}'", text));
    out.push_back(parse(item));
  }
  return out;
}

std::string show(double v) {
  if (std::isinf(v)) return "inf";
  return fmt::format("{}", v);
}

std::string show(bool v) { return v ? "true" : "false"; }

template <typename T>
std::string show_list(const std::vector<T>& v) {
  return fmt::format("{}", fmt::join(v, ","));
}

template <typename Enum, typename Parse>
Enum parse_enum(const std::string& text, Parse parse) {
  try {
    return parse(trim(text));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

#define STIRAP_DOUBLE(name, field) \
  Key{name, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(v); }, \
      [](const ExperimentConfig& c) { return show(c.field); }}
#define STIRAP_TIME(name, field) \
  Key{name, [](ExperimentConfig& c, const std::string& v) { c.field = to_time(v); }, \
      [](const ExperimentConfig& c) { return show(c.field); }}
#define STIRAP_DOUBLE_LIST(name, field) \
  Key{name, [](ExperimentConfig& c, const std::string& v) { c.field = to_list<double>(v, to_double); }, \
      [](const ExperimentConfig& c) { return show_list(c.field); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"experiment",
          [](ExperimentConfig& c, const std::string& v) {
            if (parse_experiment(trim(v)) != c.kind) {
              throw ConfigError(fmt::format("config is for '{}' but the experiment is '{}'", trim(v),
                                            to_string(c.kind)));
            }
          },
          [](const ExperimentConfig& c) { return std::string(to_string(c.kind)); }},
      Key{"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = to_int<std::uint64_t>(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      Key{"threads", [](ExperimentConfig& c, const std::string& v) { c.threads = to_int<int>(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.threads); }},
      Key{"readout",
          [](ExperimentConfig& c, const std::string& v) {
            c.readout = parse_enum<ReadoutMode>(v, parse_readout_mode);
          },
          [](const ExperimentConfig& c) { return std::string(to_string(c.readout)); }},

      STIRAP_DOUBLE("lambda.rabi_mhz", lambda.rabi_mhz),
      STIRAP_DOUBLE("lambda.one_photon_detuning_mhz", lambda.one_photon_detuning_mhz),
      STIRAP_DOUBLE("lambda.two_photon_detuning_mhz", lambda.two_photon_detuning_mhz),
      STIRAP_TIME("lambda.decay_to_minus_ns", lambda.decay_to_minus_ns),
      STIRAP_TIME("lambda.decay_to_plus_ns", lambda.decay_to_plus_ns),
      STIRAP_TIME("lambda.decay_to_zero_ns", lambda.decay_to_zero_ns),
      STIRAP_TIME("lambda.orbital_dephasing_ns", lambda.orbital_dephasing_ns),
      STIRAP_TIME("lambda.spin_dephasing_ns", lambda.spin_dephasing_ns),
      STIRAP_DOUBLE("lambda.rabi_ratio", lambda.rabi_ratio),
      Key{"lambda.spin_dephasing",
          [](ExperimentConfig& c, const std::string& v) {
            c.lambda.spin_dephasing = parse_enum<SpinDephasing>(v, parse_spin_dephasing);
          },
          [](const ExperimentConfig& c) { return std::string(to_string(c.lambda.spin_dephasing)); }},
      Key{"lambda.dissipation", [](ExperimentConfig& c, const std::string& v) { c.dissipation = to_bool(v); },
          [](const ExperimentConfig& c) { return show(c.dissipation); }},

      STIRAP_DOUBLE("schedule.wedge_deg", schedule.loop.wedge_deg),
      STIRAP_DOUBLE("schedule.tau_ns", schedule.loop.tau_ns),
      Key{"schedule.shape",
          [](ExperimentConfig& c, const std::string& v) {
            c.schedule.loop.shape = parse_enum<PulseShape>(v, parse_shape);
          },
          [](const ExperimentConfig& c) { return std::string(to_string(c.schedule.loop.shape)); }},
      STIRAP_DOUBLE("schedule.dwell_fraction", schedule.loop.dwell_fraction),
      Key{"schedule.steps",
          [](ExperimentConfig& c, const std::string& v) { c.schedule.loop.steps = to_int<std::size_t>(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.schedule.loop.steps); }},
      Key{"schedule.loops", [](ExperimentConfig& c, const std::string& v) { c.schedule.loops = to_int<int>(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.schedule.loops); }},
      Key{"schedule.sign",
          [](ExperimentConfig& c, const std::string& v) {
            const std::string t = trim(v);
            if (t == "+" || t == "positive") {
              c.schedule.sign = LoopSign::Positive;
            } else if (t == "-" || t == "negative") {
              c.schedule.sign = LoopSign::Negative;
            } else {
              throw ConfigError(fmt::format("'{}' is not a loop sign (+ or -)", t));
            }
          },
          [](const ExperimentConfig& c) { return std::string(c.schedule.sign == LoopSign::Positive ? "+" : "-"); }},
      Key{"schedule.echo", [](ExperimentConfig& c, const std::string& v) { c.schedule.echo = to_bool(v); },
          [](const ExperimentConfig& c) { return show(c.schedule.echo); }},

      STIRAP_DOUBLE("noise.s_theta_deg", noise.s_theta_deg),
      STIRAP_DOUBLE("noise.s_phi_deg", noise.s_phi_deg),
      STIRAP_DOUBLE("noise.bandwidth_mhz", noise.bandwidth_mhz),
      Key{"noise.runs", [](ExperimentConfig& c, const std::string& v) { c.noise.runs = to_int<int>(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.noise.runs); }},
      Key{"noise.photons", [](ExperimentConfig& c, const std::string& v) { c.noise.photons = to_int<int>(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.noise.photons); }},
      Key{"noise.mode",
          [](ExperimentConfig& c, const std::string& v) {
            c.ensemble_mode = parse_enum<EnsembleMode>(v, parse_ensemble_mode);
          },
          [](const ExperimentConfig& c) { return std::string(to_string(c.ensemble_mode)); }},

      STIRAP_DOUBLE("integration.tol", integration.tol),
      Key{"integration.substeps",
          [](ExperimentConfig& c, const std::string& v) { c.integration.substeps = to_int<int>(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.integration.substeps); }},
      STIRAP_DOUBLE("integration.record_every_ns", integration.record_every_ns),

      STIRAP_DOUBLE_LIST("sweep.delta_mhz", sweep.delta_mhz),
      STIRAP_DOUBLE_LIST("sweep.tau_ns", sweep.tau_ns),
      STIRAP_DOUBLE_LIST("sweep.rabi_mhz", sweep.rabi_mhz),
      STIRAP_DOUBLE_LIST("sweep.wedge_deg", sweep.wedge_deg),
      STIRAP_DOUBLE_LIST("sweep.s_phi_deg", sweep.s_phi_deg),
      STIRAP_DOUBLE_LIST("sweep.s_theta_deg", sweep.s_theta_deg),
      Key{"sweep.loops",
          [](ExperimentConfig& c, const std::string& v) { c.sweep.loops = to_list<int>(v, to_int<int>); },
          [](const ExperimentConfig& c) { return show_list(c.sweep.loops); }},

      Key{"output.dir", [](ExperimentConfig& c, const std::string& v) { c.out_dir = trim(v); },
          [](const ExperimentConfig& c) { return c.out_dir.string(); }},
  };
  return table;
}

#undef STIRAP_DOUBLE
#undef STIRAP_TIME
#undef STIRAP_DOUBLE_LIST

const Key& find_key(const std::string& name) {
  for (const Key& k : keys()) {
    if (k.name == name) return k;
  }
  throw ConfigError(fmt::format("unknown config key '{}'", name));
}

}  // namespace

void apply_config_text(ExperimentConfig& config, std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config syntax error on line {}: {}", e.line(), e.message()));
  }

  bool shape_set = false;
  bool dwell_set = false;
  const auto apply = [&](const std::string& name, const std::string& value) {
    const Key& key = find_key(name);
    try {
      key.set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}: {}", name, e.what()));
    }
    shape_set = shape_set || name == "schedule.shape";
    dwell_set = dwell_set || name == "schedule.dwell_fraction";
  };

  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply(name, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError(fmt::format("nested section under '{}'", name));
      apply(name + "." + key, leaf.data());
    }
  }
  if (shape_set && !dwell_set) {
    config.schedule.loop.dwell_fraction =
        config.schedule.loop.shape == PulseShape::EomBessel ? kCalibratedDwell : 0.0;
  }
  validate_config(config);
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(config, buffer.str());
}

void validate_config(const ExperimentConfig& c) {
  const auto require = [](bool ok, std::string_view message) {
    if (!ok) throw ConfigError(std::string(message));
  };
  try {
    c.lambda.validate();
    c.noise.validate();
    (void)tangerine(c.schedule.loop);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  require(c.threads >= 1, "threads must be >= 1");
  require(c.schedule.loops >= 1, "schedule.loops must be >= 1");
  require(!c.schedule.echo || c.schedule.loops % 2 == 0, "echo needs an even schedule.loops");
  require(c.integration.tol >= 1e-12 && c.integration.tol <= 1e-6, "integration.tol outside [1e-12, 1e-6]");
  require(c.integration.substeps >= 0, "integration.substeps must be >= 0");
  require(c.integration.record_every_ns > 0.0, "integration.record_every_ns must be > 0");
  for (double t : c.sweep.tau_ns) require(t > 0.0, "sweep.tau_ns entries must be > 0");
  for (double r : c.sweep.rabi_mhz) require(r >= 0.0, "sweep.rabi_mhz entries must be >= 0");
  for (double s : c.sweep.s_phi_deg) require(s >= 0.0, "sweep.s_phi_deg entries must be >= 0");
  for (double s : c.sweep.s_theta_deg) require(s >= 0.0, "sweep.s_theta_deg entries must be >= 0");
  for (double w : c.sweep.wedge_deg) require(std::abs(w) <= 360.0, "sweep.wedge_deg entries outside [-360, 360]");
  for (int n : c.sweep.loops) require(n >= 1, "sweep.loops entries must be >= 1");

  switch (c.kind) {
    case ExperimentKind::BerrySweep:
      require(!c.sweep.wedge_deg.empty(), "berry-sweep needs sweep.wedge_deg");
      break;
    case ExperimentKind::StarkSweep: {
      require(!c.sweep.delta_mhz.empty(), "stark-sweep needs sweep.delta_mhz");
      require(!c.sweep.rabi_mhz.empty(), "stark-sweep needs sweep.rabi_mhz");
      std::vector<double> taus = c.sweep.tau_ns;
      std::sort(taus.begin(), taus.end());
      require(std::unique(taus.begin(), taus.end()) - taus.begin() >= 2,
              "stark-sweep needs at least two distinct sweep.tau_ns");
      break;
    }
    case ExperimentKind::VisibilityMap:
      require(!c.sweep.tau_ns.empty() && !c.sweep.rabi_mhz.empty() && !c.sweep.wedge_deg.empty(),
              "visibility-map needs sweep.tau_ns, sweep.rabi_mhz and sweep.wedge_deg");
      break;
    case ExperimentKind::NoiseRobustness:
      require(!c.sweep.s_phi_deg.empty() || !c.sweep.s_theta_deg.empty(),
              "noise-robustness needs sweep.s_phi_deg or sweep.s_theta_deg");
      break;
    default:
      break;
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : keys()) out.emplace_back(k.name, k.get(config));
  return out;
}

}  // namespace stirap
