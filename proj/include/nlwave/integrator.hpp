#pragma once

// Adaptive Dormand-Prince 5(4) integration of a TruncatedSystem.
//
// The 5th-order solution is propagated (local extrapolation, FSAL). A step
// is accepted when ||err||_inf <= abs_tol + rel_tol * max(||y_n||_inf,
// ||y_{n+1}||_inf). Snapshot times are hit exactly by clipping the step,
// never by interpolation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlwave/error.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/system.hpp"

namespace nlwave {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  std::optional<double> initial_step;  // nullopt: automatic
  double max_step = std::numeric_limits<double>::infinity();
  std::int64_t max_steps = 1'000'000;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("integrator: rel_tol must lie in (0, 1)");
    if (!(abs_tol > 0.0 && abs_tol < 1.0)) throw InvalidArgument("integrator: abs_tol must lie in (0, 1)");
    if (initial_step && !(*initial_step > 0.0)) throw InvalidArgument("integrator: initial_step must be positive");
    if (!(max_step > 0.0)) throw InvalidArgument("integrator: max_step must be positive");
    if (max_steps < 1) throw InvalidArgument("integrator: max_steps must be >= 1");
  }
};

struct StepStatistics {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t rhs_evaluations = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  StepStatistics stats;

  const StateVector& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

namespace dopri5 {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
// 5th-order weights (also row 7, FSAL)
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

inline constexpr double kSafety = 0.9;
inline constexpr double kMinFactor = 0.2;
inline constexpr double kMaxFactor = 5.0;

}  // namespace dopri5

namespace detail {

inline double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Merges {0}, the requested snapshots and t_end into a strictly increasing list.
inline std::vector<double> output_times(double t_end, std::span<const double> snapshots) {
  std::vector<double> out{0.0};
  for (double t : snapshots) {
    if (!(t >= 0.0 && t <= t_end)) throw InvalidArgument("integrate: snapshot " + std::to_string(t) + " outside [0, t_end]");
    out.push_back(t);
  }
  out.push_back(t_end);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// Hairer-Norsett-Wanner starting step from two derivative evaluations.
inline double initial_step_estimate(const TruncatedSystem& sys, std::span<const double> y0, std::span<const double> f0,
                                    const IntegratorConfig& cfg, std::int64_t& evals) {
  const std::size_t n = y0.size();
  const double sc0 = cfg.abs_tol + cfg.rel_tol * detail::sup_norm(y0);
  const double d0 = detail::sup_norm(y0) / sc0;
  const double d1 = detail::sup_norm(f0) / sc0;
  const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;

  std::vector<double> y1(n), f1(n);
  for (std::size_t k = 0; k < n; ++k) y1[k] = y0[k] + h0 * f0[k];
  sys.rhs(y1, f1);
  ++evals;
  double d2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) d2 = std::max(d2, std::abs(f1[k] - f0[k]));
  d2 /= sc0 * h0;

  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min(100.0 * h0, h1);
}

// Integrates v' = rhs(v) from t = 0 to t_end. The trajectory holds the state
// at t = 0, at every snapshot, and at t_end.
inline Trajectory integrate(const TruncatedSystem& sys, const StateVector& initial, double t_end,
                            std::span<const double> snapshots, const IntegratorConfig& cfg = {}) {
  using namespace dopri5;
  cfg.validate();
  if (!(initial.grid() == sys.grid())) throw GridMismatch("integrate: initial state is on a different grid");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("integrate: t_end must be finite and >= 0");

  const std::vector<double> targets = detail::output_times(t_end, snapshots);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  if (targets.size() == 1) return traj;

  const std::size_t n = initial.size();
  std::vector<double> y(initial.values().begin(), initial.values().end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);

  double t = 0.0;
  auto eval = [&](std::span<const double> at, std::span<double> out) {
    try {
      sys.rhs(at, out);
    } catch (const BlowUp& e) {
      throw BlowUp(std::string(e.what()) + " at t=" + std::to_string(t), t);
    }
    ++traj.stats.rhs_evaluations;
  };

  eval(y, k1);
  double step = cfg.initial_step ? *cfg.initial_step : initial_step_estimate(sys, y, k1, cfg, traj.stats.rhs_evaluations);
  step = std::min(step, cfg.max_step);
  bool last_rejected = false;

  for (std::size_t next = 1; next < targets.size(); ++next) {
    const double target = targets[next];
    while (t < target) {
      if (traj.stats.accepted + traj.stats.rejected >= cfg.max_steps)
        throw StepFailure("integrate: max_steps exceeded at t=" + std::to_string(t));

      const double remaining = target - t;
      // land exactly on the target when the step would overshoot or nearly reach it
      const bool clipped = step >= remaining * (1.0 - 1e-12);
      const double hs = clipped ? remaining : step;
      if (hs <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
        throw StepFailure("integrate: step size underflow at t=" + std::to_string(t));

      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
      eval(tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
      eval(tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      eval(tmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      eval(tmp, k5);
      for (std::size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      eval(tmp, k6);
      for (std::size_t i = 0; i < n; ++i)
        ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      eval(ynew, k7);

      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        err = std::max(err, std::abs(hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i])));
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(detail::sup_norm(y), detail::sup_norm(ynew));
      err /= scale;

      if (err <= 1.0) {
        ++traj.stats.accepted;
        t = clipped ? target : t + hs;
        y.swap(ynew);
        k1.swap(k7);
        double factor = err == 0.0 ? kMaxFactor : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
        if (last_rejected) factor = std::min(factor, 1.0);
        // a clipped step says nothing about the controller's preferred size
        const double proposal = std::min(hs * factor, cfg.max_step);
        step = clipped ? std::max(step, proposal) : proposal;
        step = std::min(step, cfg.max_step);
        last_rejected = false;
      } else {
        ++traj.stats.rejected;
        step = hs * std::max(kMinFactor, kSafety * std::pow(err, -0.2));
        last_rejected = true;
      }
    }
    traj.times.push_back(target);
    traj.states.emplace_back(sys.grid(), y);
  }
  return traj;
}

}  // namespace nlwave
