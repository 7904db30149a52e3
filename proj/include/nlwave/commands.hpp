#pragma once

// The four CLI commands. Each validates its whole config, runs the study,
// renders every output file in memory and only then writes them, so a
// failing command leaves no partial output behind.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlwave/config.hpp"
#include "nlwave/csv.hpp"
#include "nlwave/experiments.hpp"
#include "nlwave/parallel.hpp"

namespace nlwave {

struct CommandOptions {
  std::optional<std::filesystem::path> output_dir;  // overrides env and config
  unsigned workers = default_worker_count();
  ConvolutionPath path = ConvolutionPath::Auto;
  bool record_timing = true;
};

inline constexpr const char* kOutputDirEnv = "NLWAVE_OUTPUT_DIR";

// --output, then $NLWAVE_OUTPUT_DIR, then [output] dir, then ".".
inline std::filesystem::path resolve_output_dir(const RunConfig& cfg, const CommandOptions& opt) {
  if (opt.output_dir) return *opt.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  if (cfg.output_dir) return *cfg.output_dir;
  return ".";
}

class OutputBundle {
 public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }
  const std::vector<std::pair<std::string, std::string>>& files() const noexcept { return files_; }

  // Each file goes to a temporary name first and is renamed into place.
  void commit(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files_) {
      const auto target = dir / name;
      auto tmp = target;
      tmp += ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw Error("write failed for '" + tmp.string() + "'");
      }
      std::filesystem::rename(tmp, target);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

namespace detail {

inline StudyOptions study_options(const RunConfig& cfg, const CommandOptions& opt) {
  StudyOptions s;
  s.integrator = cfg.integrator;
  s.path = opt.path;
  s.blow_up_threshold = cfg.blow_up_threshold;
  s.workers = opt.workers;
  s.record_timing = opt.record_timing;
  s.snapshots = cfg.snapshot_times;
  return s;
}

inline nlohmann::ordered_json record_json(const ErrorRecord& r) {
  return {{"h", r.h},
          {"N", r.n_half},
          {"t", r.t},
          {"linf_error", r.linf_error},
          {"accepted_steps", r.accepted_steps},
          {"rejected_steps", r.rejected_steps},
          {"wall_seconds", r.wall_seconds},
          {"mass_initial", r.mass_initial},
          {"mass_final", r.mass_final},
          {"relative_mass_drift", r.relative_mass_drift()}};
}

inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  switch (cfg.equation) {
    case EquationKind::Bbm: j["equation"] = {{"kind", "bbm"}, {"p", cfg.p}, {"c", cfg.c}, {"x0", cfg.x0}}; break;
    case EquationKind::Rosenau: j["equation"] = {{"kind", "rosenau"}, {"x0", cfg.x0}}; break;
    case EquationKind::Custom:
      j["equation"] = {{"kind", "custom"}, {"kernel_file", cfg.kernel_file.string()}, {"nonlinearity", cfg.nonlinearity}};
      break;
  }
  j["t_end"] = cfg.t_end;
  j["rel_tol"] = cfg.integrator.rel_tol;
  j["abs_tol"] = cfg.integrator.abs_tol;
  return j;
}

template <typename Body>
int guarded(const char* name, std::ostream& err, Body&& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    err << "nlwave " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "nlwave " << name << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace detail

// profile_<k>.csv per output time (x, numeric, exact), summary.csv, summary.json.
inline int cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& err = std::cerr) {
  return detail::guarded("simulate", err, [&] {
    validate_config(cfg, Command::Simulate);
    const auto dir = resolve_output_dir(cfg, opt);
    const Problem problem = cfg.problem();
    const Grid grid = cfg.grid();
    const ProfileStudy study = run_profile_study(problem, grid, cfg.t_end, detail::study_options(cfg, opt));
    const Trajectory& traj = study.run.trajectory;

    OutputBundle out;
    nlohmann::ordered_json profiles = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      CsvWriter csv({"x", "numeric", "exact"});
      const double t = traj.times[k];
      for (int i = -grid.n_half(); i <= grid.n_half(); ++i) {
        csv.field(grid.x(i)).field(traj.states[k][i]);
        csv.field(problem.wave ? std::optional<double>((*problem.wave)(grid.x(i), t)) : std::nullopt);
        csv.end_row();
      }
      char name[32];
      std::snprintf(name, sizeof(name), "profile_%03zu.csv", k);
      out.add(name, csv.str());
      profiles.push_back({{"file", name}, {"t", t}});
    }

    const ErrorRecord& r = study.record;
    CsvWriter summary({"h", "N", "t_end", "linf_error", "accepted_steps", "rejected_steps", "wall_seconds",
                       "mass_initial", "mass_final", "relative_mass_drift"});
    summary.field(r.h).field(r.n_half).field(r.t);
    summary.field(problem.wave ? std::optional<double>(r.linf_error) : std::nullopt);
    summary.field(r.accepted_steps).field(r.rejected_steps).field(r.wall_seconds);
    summary.field(r.mass_initial).field(r.mass_final).field(r.relative_mass_drift());
    summary.end_row();
    out.add("summary.csv", summary.str());

    nlohmann::ordered_json j;
    j["command"] = "simulate";
    j["config"] = detail::config_json(cfg);
    j["record"] = detail::record_json(r);
    if (!problem.wave) j["record"]["linf_error"] = nullptr;
    j["profiles"] = profiles;
    out.add("summary.json", j.dump(2) + "\n");
    out.commit(dir);
  });
}

// convergence.csv: h, N, linf_error, rho_vs_previous, accepted_steps, wall_seconds
inline int cmd_converge(const RunConfig& cfg, const CommandOptions& opt, std::ostream& err = std::cerr) {
  return detail::guarded("converge", err, [&] {
    validate_config(cfg, Command::Converge);
    const auto dir = resolve_output_dir(cfg, opt);
    const RefinementStudy study =
        run_h_refinement(cfg.problem(), *cfg.domain_half_width, cfg.h_list, cfg.t_end, detail::study_options(cfg, opt));

    CsvWriter csv({"h", "N", "linf_error", "rho_vs_previous", "accepted_steps", "wall_seconds"});
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < study.records.size(); ++k) {
      const ErrorRecord& r = study.records[k];
      csv.field(r.h).field(r.n_half).field(r.linf_error);
      if (study.rates[k])
        csv.field(study.rates[k]->rho);
      else
        csv.field(std::string_view());
      csv.field(r.accepted_steps).field(r.wall_seconds);
      csv.end_row();
      auto row = detail::record_json(r);
      row["rho_vs_previous"] = nullptr;
      if (study.rates[k]) row["rho_vs_previous"] = study.rates[k]->rho;
      rows.push_back(row);
    }
    OutputBundle out;
    out.add("convergence.csv", csv.str());
    nlohmann::ordered_json j;
    j["command"] = "converge";
    j["config"] = detail::config_json(cfg);
    j["domain_half_width"] = *cfg.domain_half_width;
    j["error_reference"] = study.self_refined ? "self-refinement" : "exact";
    j["records"] = rows;
    out.add("summary.json", j.dump(2) + "\n");
    out.commit(dir);
  });
}

// truncation.csv: N, domain_half_width, linf_error, delta, eps_delta
inline int cmd_truncation(const RunConfig& cfg, const CommandOptions& opt, std::ostream& err = std::cerr) {
  return detail::guarded("truncation", err, [&] {
    validate_config(cfg, Command::Truncation);
    const auto dir = resolve_output_dir(cfg, opt);
    const TruncationStudy study =
        run_truncation_study(cfg.problem(), *cfg.h, cfg.n_list, cfg.t_end, detail::study_options(cfg, opt));

    CsvWriter csv({"N", "domain_half_width", "linf_error", "delta", "eps_delta"});
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& tr : study.records) {
      csv.field(tr.record.n_half).field(tr.domain_half_width).field(tr.record.linf_error).field(tr.delta).field(tr.eps_delta);
      csv.end_row();
      auto row = detail::record_json(tr.record);
      row["domain_half_width"] = tr.domain_half_width;
      row["delta"] = tr.delta;
      row["eps_delta"] = tr.eps_delta;
      rows.push_back(row);
    }
    OutputBundle out;
    out.add("truncation.csv", csv.str());
    nlohmann::ordered_json j;
    j["command"] = "truncation";
    j["config"] = detail::config_json(cfg);
    j["h"] = *cfg.h;
    j["plateau_onset"] = study.plateau_onset ? nlohmann::ordered_json(*study.plateau_onset) : nlohmann::ordered_json(nullptr);
    j["records"] = rows;
    out.add("summary.json", j.dump(2) + "\n");
    out.commit(dir);
  });
}

// decay.csv: t, worst_ratio, worst_x, holds
inline int cmd_decay(const RunConfig& cfg, const CommandOptions& opt, std::ostream& err = std::cerr) {
  return detail::guarded("decay", err, [&] {
    validate_config(cfg, Command::Decay);
    const auto dir = resolve_output_dir(cfg, opt);
    StudyOptions sopt = detail::study_options(cfg, opt);
    sopt.decay = DecayCheckOptions{cfg.decay_rate, cfg.decay_scale};
    const RunResult run = run_single(cfg.problem(), cfg.grid(), cfg.t_end, sopt);

    CsvWriter csv({"t", "worst_ratio", "worst_x", "holds"});
    bool all = true;
    for (const auto& d : run.decay) {
      csv.field(d.t).field(d.report.worst_ratio).field(d.worst_x).field(d.report.holds);
      csv.end_row();
      all = all && d.report.holds;
    }
    OutputBundle out;
    out.add("decay.csv", csv.str());
    nlohmann::ordered_json j;
    j["command"] = "decay";
    j["config"] = detail::config_json(cfg);
    j["envelope"] = {{"r", run.envelope->rate}, {"scale", run.envelope->scale}, {"C", run.envelope->constant}};
    j["holds_at_all_snapshots"] = all;
    j["record"] = detail::record_json(run.record);
    out.add("summary.json", j.dump(2) + "\n");
    out.commit(dir);
  });
}

inline int run_command(Command cmd, const std::filesystem::path& config_path, const CommandOptions& opt,
                       std::ostream& err = std::cerr) {
  RunConfig cfg;
  const char* names[] = {"simulate", "converge", "truncation", "decay"};
  const int rc = detail::guarded(names[static_cast<int>(cmd)], err, [&] { cfg = load_run_config(config_path); });
  if (rc != 0) return rc;
  switch (cmd) {
    case Command::Simulate: return cmd_simulate(cfg, opt, err);
    case Command::Converge: return cmd_converge(cfg, opt, err);
    case Command::Truncation: return cmd_truncation(cfg, opt, err);
    case Command::Decay: return cmd_decay(cfg, opt, err);
  }
  return 1;
}

}  // namespace nlwave
