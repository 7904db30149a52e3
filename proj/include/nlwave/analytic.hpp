#pragma once

// Exact solitary waves used as accuracy oracles, and exponential decay
// envelopes |u(x,t)| <= C exp(-r|x|/s).

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nlwave/discrete_ops.hpp"
#include "nlwave/error.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/kernel.hpp"
#include "nlwave/system.hpp"

namespace nlwave {

class SolitaryWave {
 public:
  enum class Family { GeneralizedBbm, Rosenau };

  // u = A (sech^2(B(x - ct - x0)))^{1/p},  A = ((p+2)(c-1)/2)^{1/p},
  // B = (p/2) sqrt(1 - 1/c); solves the equation with beta = e^{-|x|}/2 and
  // f(u) = u + u^{p+1}.
  static SolitaryWave generalized_bbm(int p, double c, double x0) {
    if (p < 1) throw InvalidArgument("solitary wave: p must be >= 1");
    if (!(c > 1.0) || !std::isfinite(c)) throw InvalidArgument("solitary wave: speed c must exceed 1");
    if (!std::isfinite(x0)) throw InvalidArgument("solitary wave: x0 must be finite");
    const double amp = std::pow((p + 2) * (c - 1.0) / 2.0, 1.0 / p);
    const double width = 0.5 * p * std::sqrt(1.0 - 1.0 / c);
    return SolitaryWave(Family::GeneralizedBbm, p, c, x0, amp, width);
  }

  // u = sech(x - t/2 - x0) for the Rosenau kernel with f(u) = u - 10u^3 + 12u^5.
  static SolitaryWave rosenau(double x0) {
    if (!std::isfinite(x0)) throw InvalidArgument("solitary wave: x0 must be finite");
    return SolitaryWave(Family::Rosenau, 0, 0.5, x0, 1.0, 1.0);
  }

  Family family() const noexcept { return family_; }
  int power() const noexcept { return p_; }
  double speed() const noexcept { return c_; }
  double x0() const noexcept { return x0_; }
  double amplitude() const noexcept { return amp_; }
  double width() const noexcept { return width_; }

  SolitaryWave shifted_to(double x0) const {
    SolitaryWave w = *this;
    w.x0_ = x0;
    return w;
  }

  double operator()(double x, double t) const {
    const double xi = (x - x0_) - c_ * t;
    const double s = 1.0 / std::cosh(width_ * xi);
    if (family_ == Family::Rosenau) return s;
    if (p_ == 1) return amp_ * s * s;
    return amp_ * (p_ == 2 ? s : std::pow(s, 2.0 / p_));
  }

  Kernel kernel() const { return family_ == Family::Rosenau ? rosenau_kernel() : bbm_kernel(); }
  Nonlinearity nonlinearity() const {
    return family_ == Family::Rosenau ? Nonlinearity::rosenau_quintic() : Nonlinearity::generalized_bbm(p_);
  }
  // Length scale s of the admissible envelope e^{-r|x|/s} for this kernel.
  double envelope_scale() const { return family_ == Family::Rosenau ? std::numbers::sqrt2 : 1.0; }

  // Exact mass int u dx over the real line.
  double mass() const {
    if (family_ == Family::Rosenau) return std::numbers::pi;
    if (p_ == 1) return 2.0 * amp_ / width_;
    // int sech^{2/p}(y) dy = B(1/p, 1/2)
    const double a = 1.0 / p_;
    return amp_ / width_ * std::exp(std::lgamma(a) + std::lgamma(0.5) - std::lgamma(a + 0.5));
  }

  std::string describe() const {
    if (family_ == Family::Rosenau) return "rosenau(x0=" + std::to_string(x0_) + ")";
    return "bbm(p=" + std::to_string(p_) + ", c=" + std::to_string(c_) + ", x0=" + std::to_string(x0_) + ")";
  }

 private:
  SolitaryWave(Family f, int p, double c, double x0, double amp, double width)
      : family_(f), p_(p), c_(c), x0_(x0), amp_(amp), width_(width) {}

  Family family_;
  int p_;
  double c_;
  double x0_;
  double amp_;
  double width_;
};

inline double evaluate_solitary(const SolitaryWave& wave, double x, double t) { return wave(x, t); }

// Restriction of the wave at t = 0 to the grid.
inline StateVector initial_data(const SolitaryWave& wave, const Grid& grid) {
  return restrict_to_grid([&](double x) { return wave(x, 0.0); }, grid);
}

inline StateVector exact_state(const SolitaryWave& wave, const Grid& grid, double t) {
  return restrict_to_grid([&](double x) { return wave(x, t); }, grid);
}

struct DecayEnvelope {
  double rate = 0.9;   // r in (0, 1)
  double scale = 1.0;  // s
  double constant = 1.0;  // C

  void validate() const {
    if (!(rate > 0.0 && rate < 1.0)) throw InvalidArgument("decay envelope: rate r must lie in (0, 1)");
    if (!(scale > 0.0)) throw InvalidArgument("decay envelope: scale must be positive");
    if (!(constant > 0.0)) throw InvalidArgument("decay envelope: constant must be positive");
  }
};

struct DecayReport {
  bool holds = true;
  double worst_ratio = 0.0;
  int worst_index = 0;
};

// worst_ratio = max_i |v_i| / (C exp(-r|x_i|/s)); holds iff worst_ratio <= 1.
inline DecayReport check_decay(const StateVector& state, const DecayEnvelope& env) {
  env.validate();
  DecayReport rep;
  rep.worst_index = state.first();
  for (int i = state.first(); i <= state.last(); ++i) {
    const double ratio = std::abs(state[i]) * std::exp(env.rate * std::abs(state.grid().x(i)) / env.scale) / env.constant;
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_index = i;
    }
  }
  rep.holds = rep.worst_ratio <= 1.0;
  return rep;
}

// Smallest C for which the envelope holds on `state` (the t = 0 profile).
inline DecayEnvelope calibrate_envelope(const StateVector& state, double rate, double scale) {
  DecayEnvelope env{rate, scale, 1.0};
  env.validate();
  double c = 0.0;
  for (int i = state.first(); i <= state.last(); ++i)
    c = std::max(c, std::abs(state[i]) * std::exp(rate * std::abs(state.grid().x(i)) / scale));
  env.constant = c > 0.0 ? c : std::numeric_limits<double>::min();
  return env;
}

}  // namespace nlwave
