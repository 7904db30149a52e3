#pragma once

// Run configuration: flat key = value pairs grouped into [sections].
//
//   [equation]   kind = bbm | rosenau | custom
//                p, c, x0                  (bbm)
//                x0                        (rosenau)
//                kernel_file, nonlinearity (custom)
//   [initial]    amplitude, width, center, exponent   (custom only:
//                u0(x) = amplitude * sech(width * (x - center))^exponent)
//   [grid]       domain_half_width, h
//   [time]       t_end, snapshots
//   [integrator] rel_tol, abs_tol, initial_step, max_step, max_steps
//   [system]     blow_up_threshold
//   [study]      h_list, n_list
//   [decay]      r, scale
//   [output]     dir
//
// Unknown sections or keys are rejected. Relative kernel_file paths resolve
// against the directory of the config file.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlwave/analytic.hpp"
#include "nlwave/error.hpp"
#include "nlwave/experiments.hpp"
#include "nlwave/integrator.hpp"
#include "nlwave/kernel.hpp"
#include "nlwave/system.hpp"

namespace nlwave {

enum class EquationKind { Bbm, Rosenau, Custom };

struct InitialProfile {
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  double exponent = 2.0;

  double operator()(double x) const {
    if (amplitude == 0.0) return 0.0;
    return amplitude * std::pow(1.0 / std::cosh(width * (x - center)), exponent);
  }
};

struct RunConfig {
  EquationKind equation = EquationKind::Bbm;
  int p = 1;
  double c = 1.8;
  double x0 = 0.0;
  std::filesystem::path kernel_file;
  std::string nonlinearity;
  InitialProfile initial;

  std::optional<double> domain_half_width;
  std::optional<double> h;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  IntegratorConfig integrator;
  double blow_up_threshold = kDefaultBlowUpThreshold;

  std::vector<double> h_list;
  std::vector<int> n_list;

  double decay_rate = 0.9;
  std::optional<double> decay_scale;

  std::optional<std::filesystem::path> output_dir;

  // The grid [-L, L] with spacing h; L/h must be a positive integer.
  Grid grid() const {
    if (!domain_half_width || !h) throw ConfigError("config: [grid] needs domain_half_width and h");
    try {
      return Grid::from_domain(*domain_half_width, *h);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }

  std::optional<SolitaryWave> wave() const {
    switch (equation) {
      case EquationKind::Bbm: return SolitaryWave::generalized_bbm(p, c, x0);
      case EquationKind::Rosenau: return SolitaryWave::rosenau(x0);
      case EquationKind::Custom: break;
    }
    return std::nullopt;
  }

  Problem problem() const {
    if (auto w = wave()) return Problem::from_wave(*w);
    return Problem{load_tabulated_kernel(kernel_file.string()), Nonlinearity::parse(nonlinearity), std::nullopt,
                   initial};
  }
};

namespace detail {

inline double parse_real(const std::string& key, std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + std::string(s) + "'");
  return v;
}

inline long long parse_integer(const std::string& key, std::string_view s) {
  const double v = parse_real(key, s);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError("config: '" + key + "' expects an integer");
  return static_cast<long long>(v);
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError("config: '" + key + "' expects a comma-separated list");
  return out;
}

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"equation", {"kind", "p", "c", "x0", "kernel_file", "nonlinearity"}},
      {"initial", {"amplitude", "width", "center", "exponent"}},
      {"grid", {"domain_half_width", "h"}},
      {"time", {"t_end", "snapshots"}},
      {"integrator", {"rel_tol", "abs_tol", "initial_step", "max_step", "max_steps"}},
      {"system", {"blow_up_threshold"}},
      {"study", {"h_list", "n_list"}},
      {"decay", {"r", "scale"}},
      {"output", {"dir"}},
  };
  return keys;
}

}  // namespace detail

// Parses the text of a config file. `base_dir` anchors relative paths.
inline RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  const auto& known = detail::known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
  }

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
    return std::nullopt;
  };
  auto real = [&](const std::string& path) -> std::optional<double> {
    if (auto s = get(path)) return detail::parse_real(path, *s);
    return std::nullopt;
  };

  RunConfig cfg;
  const std::string kind = get("equation.kind").value_or("");
  if (kind == "bbm") {
    cfg.equation = EquationKind::Bbm;
  } else if (kind == "rosenau") {
    cfg.equation = EquationKind::Rosenau;
  } else if (kind == "custom") {
    cfg.equation = EquationKind::Custom;
  } else {
    throw ConfigError("config: [equation] kind must be bbm, rosenau or custom");
  }
  if (auto s = get("equation.p")) cfg.p = static_cast<int>(detail::parse_integer("equation.p", *s));
  cfg.c = real("equation.c").value_or(cfg.c);
  cfg.x0 = real("equation.x0").value_or(cfg.x0);
  if (auto s = get("equation.kernel_file")) {
    std::filesystem::path p(*s);
    cfg.kernel_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  cfg.nonlinearity = get("equation.nonlinearity").value_or("");

  cfg.initial.amplitude = real("initial.amplitude").value_or(cfg.initial.amplitude);
  cfg.initial.width = real("initial.width").value_or(cfg.initial.width);
  cfg.initial.center = real("initial.center").value_or(cfg.initial.center);
  cfg.initial.exponent = real("initial.exponent").value_or(cfg.initial.exponent);

  cfg.domain_half_width = real("grid.domain_half_width");
  cfg.h = real("grid.h");
  cfg.t_end = real("time.t_end").value_or(-1.0);
  if (auto s = get("time.snapshots")) cfg.snapshot_times = detail::parse_real_list("time.snapshots", *s);

  cfg.integrator.rel_tol = real("integrator.rel_tol").value_or(cfg.integrator.rel_tol);
  cfg.integrator.abs_tol = real("integrator.abs_tol").value_or(cfg.integrator.abs_tol);
  cfg.integrator.initial_step = real("integrator.initial_step");
  cfg.integrator.max_step = real("integrator.max_step").value_or(cfg.integrator.max_step);
  if (auto s = get("integrator.max_steps")) cfg.integrator.max_steps = detail::parse_integer("integrator.max_steps", *s);
  cfg.blow_up_threshold = real("system.blow_up_threshold").value_or(cfg.blow_up_threshold);

  if (auto s = get("study.h_list")) cfg.h_list = detail::parse_real_list("study.h_list", *s);
  if (auto s = get("study.n_list"))
    for (double v : detail::parse_real_list("study.n_list", *s)) {
      if (v != std::floor(v) || v < 1 || v > 1e8) throw ConfigError("config: n_list entries must be positive integers");
      cfg.n_list.push_back(static_cast<int>(v));
    }

  cfg.decay_rate = real("decay.r").value_or(cfg.decay_rate);
  cfg.decay_scale = real("decay.scale");
  if (auto s = get("output.dir")) cfg.output_dir = *s;
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_run_config(in, path.parent_path());
}

enum class Command { Simulate, Converge, Truncation, Decay };

// Full validation for a command; nothing may be written before this passes.
// Loads the kernel file (custom equations) so that a bad file fails here.
inline void validate_config(const RunConfig& cfg, Command cmd) {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  try {
    if (cfg.equation == EquationKind::Custom) {
      if (cfg.kernel_file.empty()) fail("custom equation needs [equation] kernel_file");
      if (cfg.nonlinearity.empty()) fail("custom equation needs [equation] nonlinearity");
      (void)Nonlinearity::parse(cfg.nonlinearity);
      (void)load_tabulated_kernel(cfg.kernel_file.string());
      if (!(cfg.initial.width > 0.0) || !(cfg.initial.exponent > 0.0))
        fail("[initial] width and exponent must be positive");
    } else {
      (void)cfg.wave();
    }
    if (!(cfg.t_end >= 0.0)) fail("[time] t_end is required and must be >= 0");
    for (double t : cfg.snapshot_times)
      if (!(t >= 0.0 && t <= cfg.t_end)) fail("snapshot time " + std::to_string(t) + " outside [0, t_end]");
    cfg.integrator.validate();
    if (!(cfg.blow_up_threshold > 0.0)) fail("[system] blow_up_threshold must be positive");

    switch (cmd) {
      case Command::Simulate:
      case Command::Decay:
        (void)cfg.grid();
        break;
      case Command::Converge: {
        if (!cfg.domain_half_width) fail("[grid] domain_half_width is required");
        if (cfg.h_list.empty()) fail("[study] h_list is required");
        for (std::size_t k = 0; k < cfg.h_list.size(); ++k) {
          if (k > 0 && !(cfg.h_list[k] < cfg.h_list[k - 1])) fail("h_list must be strictly decreasing");
          (void)Grid::from_domain(*cfg.domain_half_width, cfg.h_list[k]);
        }
        break;
      }
      case Command::Truncation: {
        if (!cfg.h || !(*cfg.h > 0.0)) fail("[grid] h is required");
        if (cfg.n_list.empty()) fail("[study] n_list is required");
        for (std::size_t k = 1; k < cfg.n_list.size(); ++k)
          if (!(cfg.n_list[k] > cfg.n_list[k - 1])) fail("n_list must be strictly increasing");
        if (cfg.equation != EquationKind::Custom && std::abs(cfg.x0) >= cfg.n_list.front() * *cfg.h)
          fail("initial wave centre lies outside the smallest domain");
        break;
      }
    }
    if (cmd == Command::Decay) {
      if (!(cfg.decay_rate > 0.0 && cfg.decay_rate < 1.0)) fail("[decay] r must satisfy 0 < r < 1");
      if (cfg.decay_scale && !(*cfg.decay_scale > 0.0)) fail("[decay] scale must be positive");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace nlwave
