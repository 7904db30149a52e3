#pragma once

// Error metrics and the three study protocols: single-profile comparison,
// mesh refinement at fixed domain, and domain truncation at fixed mesh.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/analytic.hpp"
#include "nlwave/discrete_ops.hpp"
#include "nlwave/error.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/integrator.hpp"
#include "nlwave/kernel.hpp"
#include "nlwave/parallel.hpp"
#include "nlwave/system.hpp"

namespace nlwave {

struct ErrorRecord {
  double h = 0.0;
  int n_half = 0;
  double t = 0.0;
  double linf_error = 0.0;
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
  double wall_seconds = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;

  double relative_mass_drift() const {
    const double d = std::abs(mass_final - mass_initial);
    return mass_initial != 0.0 ? d / std::abs(mass_initial) : d;
  }
};

struct RateEstimate {
  double h1 = 0.0;
  double h2 = 0.0;
  double rho = 0.0;
};

// max_i |u(x_i, t) - v_i|
inline double linf_error(const StateVector& numeric, const SolitaryWave& wave, double t) {
  double m = 0.0;
  for (int i = numeric.first(); i <= numeric.last(); ++i)
    m = std::max(m, std::abs(wave(numeric.grid().x(i), t) - numeric[i]));
  return m;
}

// rho = log(E1/E2) / log(h1/h2)
inline RateEstimate convergence_rate(const ErrorRecord& e1, const ErrorRecord& e2) {
  if (!(e1.h > 0.0) || !(e2.h > 0.0) || e1.h == e2.h)
    throw InvalidArgument("convergence_rate: mesh sizes must be positive and distinct");
  if (!(e1.linf_error > 0.0) || !(e2.linf_error > 0.0))
    throw DegenerateRate("convergence_rate: zero error, rate undefined");
  return {e1.h, e2.h, std::log(e1.linf_error / e2.linf_error) / std::log(e1.h / e2.h)};
}

// Kernel, nonlinearity and initial data. With an exact wave the error is
// measured against it; otherwise the profile supplies the initial data and
// studies fall back to self-refinement.
struct Problem {
  Kernel kernel;
  Nonlinearity nonlinearity;
  std::optional<SolitaryWave> wave;
  std::function<double(double)> initial_profile;

  static Problem from_wave(const SolitaryWave& w) {
    return Problem{w.kernel(), w.nonlinearity(), w, [w](double x) { return w(x, 0.0); }};
  }

  StateVector initial(const Grid& grid) const {
    if (wave) return initial_data(*wave, grid);
    if (!initial_profile) throw InvalidArgument("problem: no initial data");
    return restrict_to_grid(initial_profile, grid);
  }

  double envelope_scale() const { return wave ? wave->envelope_scale() : 1.0; }
};

struct DecayCheckOptions {
  double rate = 0.9;
  std::optional<double> scale;  // default: the problem's envelope scale
};

struct StudyOptions {
  IntegratorConfig integrator;
  ConvolutionPath path = ConvolutionPath::Auto;
  double blow_up_threshold = kDefaultBlowUpThreshold;
  unsigned workers = 1;
  bool record_timing = true;
  std::vector<double> snapshots;  // extra output times inside [0, t_end]
  std::optional<DecayCheckOptions> decay;
};

struct DecaySample {
  double t = 0.0;
  DecayReport report;
  double worst_x = 0.0;
};

struct RunResult {
  Trajectory trajectory;
  ErrorRecord record;  // linf_error is 0 when the problem has no exact wave
  std::optional<DecayEnvelope> envelope;
  std::vector<DecaySample> decay;
};

inline RunResult run_single(const Problem& problem, const Grid& grid, double t_end, const StudyOptions& opt) {
  const TruncatedSystem sys = build_system(problem.kernel, grid, problem.nonlinearity, opt.blow_up_threshold, opt.path);
  const StateVector v0 = problem.initial(grid);

  const auto start = std::chrono::steady_clock::now();
  RunResult out{integrate(sys, v0, t_end, opt.snapshots, opt.integrator), {}, std::nullopt, {}};
  const auto stop = std::chrono::steady_clock::now();

  ErrorRecord& r = out.record;
  r.h = grid.h();
  r.n_half = grid.n_half();
  r.t = t_end;
  r.accepted_steps = out.trajectory.stats.accepted;
  r.rejected_steps = out.trajectory.stats.rejected;
  r.wall_seconds = opt.record_timing ? std::chrono::duration<double>(stop - start).count() : 0.0;
  r.mass_initial = discrete_mass(v0);
  r.mass_final = discrete_mass(out.trajectory.final_state());
  if (problem.wave) r.linf_error = linf_error(out.trajectory.final_state(), *problem.wave, t_end);

  if (opt.decay) {
    const double scale = opt.decay->scale.value_or(problem.envelope_scale());
    out.envelope = calibrate_envelope(v0, opt.decay->rate, scale);
    for (std::size_t k = 0; k < out.trajectory.times.size(); ++k) {
      const auto rep = check_decay(out.trajectory.states[k], *out.envelope);
      out.decay.push_back({out.trajectory.times[k], rep, grid.x(rep.worst_index)});
    }
  }
  return out;
}

struct ProfileStudy {
  StateVector initial;
  StateVector numeric_final;
  std::optional<StateVector> exact_final;
  ErrorRecord record;
  RunResult run;
};

inline ProfileStudy run_profile_study(const Problem& problem, const Grid& grid, double t_end, const StudyOptions& opt) {
  RunResult run = run_single(problem, grid, t_end, opt);
  ProfileStudy s{run.trajectory.states.front(), run.trajectory.final_state(), std::nullopt, run.record, {}};
  if (problem.wave) s.exact_final = exact_state(*problem.wave, grid, t_end);
  s.run = std::move(run);
  return s;
}

struct RefinementStudy {
  std::vector<ErrorRecord> records;              // ordered as the h list
  std::vector<std::optional<RateEstimate>> rates;  // rates[k] against records[k-1]; empty for k = 0
  std::vector<RunResult> runs;
  bool self_refined = false;  // errors measured against a run at h_min/2
};

namespace detail {

inline void check_refinement_list(const std::vector<double>& hs, double half_width) {
  if (hs.empty()) throw InvalidArgument("h-refinement: empty h list");
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (k > 0 && !(hs[k] < hs[k - 1])) throw InvalidArgument("h-refinement: h list must be strictly decreasing");
    (void)Grid::from_domain(half_width, hs[k]);
  }
}

// max over coarse nodes of |coarse - fine| where fine lives on a grid
// refining the coarse one by an integer factor.
inline double nodal_difference(const StateVector& coarse, const StateVector& fine) {
  const double ratio = coarse.grid().h() / fine.grid().h();
  const int m = static_cast<int>(std::lround(ratio));
  if (m < 1 || std::abs(ratio - m) > 1e-9 * ratio) throw InvalidArgument("self-refinement: grids are not nested");
  double e = 0.0;
  for (int i = coarse.first(); i <= coarse.last(); ++i) e = std::max(e, std::abs(coarse[i] - fine[i * m]));
  return e;
}

}  // namespace detail

// Errors at t_end for each h on the fixed domain [-L, L] and the rate of
// every successive pair. Throws DegenerateRate if a rate is undefined.
inline RefinementStudy run_h_refinement(const Problem& problem, double half_width, const std::vector<double>& hs,
                                        double t_end, const StudyOptions& opt) {
  detail::check_refinement_list(hs, half_width);
  RefinementStudy study;
  study.self_refined = !problem.wave.has_value();

  std::vector<double> run_hs = hs;
  if (study.self_refined) run_hs.push_back(hs.back() / 2.0);
  std::vector<std::optional<RunResult>> results(run_hs.size());
  parallel_for(run_hs.size(), opt.workers, [&](std::size_t k) {
    results[k] = run_single(problem, Grid::from_domain(half_width, run_hs[k]), t_end, opt);
  });

  for (std::size_t k = 0; k < hs.size(); ++k) {
    RunResult& r = *results[k];
    if (study.self_refined)
      r.record.linf_error = detail::nodal_difference(r.trajectory.final_state(), results.back()->trajectory.final_state());
    study.records.push_back(r.record);
    study.runs.push_back(std::move(r));
  }
  study.rates.emplace_back();
  for (std::size_t k = 1; k < study.records.size(); ++k)
    study.rates.emplace_back(convergence_rate(study.records[k - 1], study.records[k]));
  return study;
}

struct TruncationRecord {
  ErrorRecord record;
  double domain_half_width = 0.0;
  double delta = 0.0;      // sup of |u| outside [-Nh, Nh] over [0, T]
  double eps_delta = 0.0;  // max_{|z| <= delta} |f(z)|
};

struct TruncationStudy {
  std::vector<TruncationRecord> records;  // ordered as the N list
  std::optional<int> plateau_onset;       // first N whose error ratio to the previous N exceeds 0.9
  std::vector<RunResult> runs;
};

inline constexpr double kPlateauRatio = 0.9;

// sup_{t in [0,T], |x| >= L} |u(x,t)| for a solitary wave: the profile
// decreases away from its centre and |centre(t)| is largest at t = 0 or T.
inline double exterior_amplitude(const SolitaryWave& wave, double half_width, double t_end) {
  double delta = 0.0;
  for (double t : {0.0, t_end}) {
    const double centre = wave.x0() + wave.speed() * t;
    if (std::abs(centre) >= half_width) return std::abs(wave(centre, t));
    delta = std::max({delta, std::abs(wave(half_width, t)), std::abs(wave(-half_width, t))});
  }
  return delta;
}

inline std::optional<int> detect_plateau(const std::vector<TruncationRecord>& recs) {
  for (std::size_t k = 1; k < recs.size(); ++k) {
    const double prev = recs[k - 1].record.linf_error, cur = recs[k].record.linf_error;
    if (prev > 0.0 && cur / prev > kPlateauRatio) return recs[k].record.n_half;
  }
  return std::nullopt;
}

// Errors at t_end for each N at fixed h on the domains [-Nh, Nh].
inline TruncationStudy run_truncation_study(const Problem& problem, double h, const std::vector<int>& ns, double t_end,
                                            const StudyOptions& opt) {
  if (ns.empty()) throw InvalidArgument("truncation study: empty N list");
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] < 1) throw InvalidArgument("truncation study: N must be >= 1");
    if (k > 0 && !(ns[k] > ns[k - 1])) throw InvalidArgument("truncation study: N list must be strictly increasing");
  }
  if (problem.wave && std::abs(problem.wave->x0()) >= ns.front() * h)
    throw InvalidArgument("truncation study: initial wave centre lies outside the smallest domain");

  std::vector<std::optional<RunResult>> results(ns.size());
  parallel_for(ns.size(), opt.workers,
               [&](std::size_t k) { results[k] = run_single(problem, Grid(h, ns[k]), t_end, opt); });

  TruncationStudy study;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    RunResult& r = *results[k];
    TruncationRecord tr;
    tr.record = r.record;
    tr.domain_half_width = ns[k] * h;
    if (problem.wave) {
      tr.delta = exterior_amplitude(*problem.wave, tr.domain_half_width, t_end);
    } else {
      for (const auto& s : r.trajectory.states) tr.delta = std::max(tr.delta, boundary_band_amplitude(s, 1));
    }
    tr.eps_delta = problem.nonlinearity.max_abs_on(tr.delta);
    study.records.push_back(tr);
    study.runs.push_back(std::move(r));
  }
  if (!problem.wave) {
    // self-reference: compare against the largest domain on the shared nodes
    const StateVector& ref = study.runs.back().trajectory.final_state();
    for (std::size_t k = 0; k < study.records.size(); ++k) {
      const StateVector& v = study.runs[k].trajectory.final_state();
      double e = 0.0;
      for (int i = v.first(); i <= v.last(); ++i) e = std::max(e, std::abs(v[i] - ref[i]));
      study.records[k].record.linf_error = e;
    }
  }
  study.plateau_onset = detect_plateau(study.records);
  return study;
}

}  // namespace nlwave
