#pragma once

// Grid operators on sampled sequences: restriction, discrete convolution
// (w * v)_i = sum_j h w_{i-j} v_j, central differences and l^p_h norms.
// Sequences are finite; indices outside [-N, N] read as zero.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nlwave/error.hpp"
#include "nlwave/fft_convolver.hpp"
#include "nlwave/grid.hpp"

namespace nlwave {

enum class ConvolutionPath { Auto, Direct, Fast };

// Below this N the direct double loop beats the transform.
inline constexpr int kFastConvolutionMinN = 32;

inline bool use_fast_path(ConvolutionPath path, int n_half) {
  switch (path) {
    case ConvolutionPath::Direct: return false;
    case ConvolutionPath::Fast: return true;
    case ConvolutionPath::Auto: break;
  }
  return n_half >= kFastConvolutionMinN;
}

template <typename F>
SampledSequence restrict_to_grid(F&& fn, const Grid& grid) {
  SampledSequence out(grid);
  for (int i = -grid.n_half(); i <= grid.n_half(); ++i) {
    const double y = fn(grid.x(i));
    if (!std::isfinite(y)) throw InvalidArgument("restrict: non-finite value at x=" + std::to_string(grid.x(i)));
    out[i] = y;
  }
  return out;
}

inline SampledSequence convolve_direct(const SampledSequence& w, const SampledSequence& v) {
  require_same_grid(w, v, "convolution");
  const Grid& g = w.grid();
  const int n = g.n_half();
  SampledSequence out(g);
  for (int i = -n; i <= n; ++i) {
    double acc = 0.0;
    for (int j = std::max(-n, i - n); j <= std::min(n, i + n); ++j) acc += w[i - j] * v[j];
    out[i] = g.h() * acc;
  }
  return out;
}

inline SampledSequence convolve_fast(const SampledSequence& w, const SampledSequence& v) {
  require_same_grid(w, v, "convolution");
  const Grid& g = w.grid();
  const std::size_t m = g.size();
  // linear convolution of two length-m sequences has length 2m-1
  const FftConvolver conv(w.values(), next_power_of_two(2 * m - 1));
  SampledSequence out(g);
  conv.apply(v.values(), static_cast<std::size_t>(g.n_half()), out.values());
  for (double& x : out.values()) x *= g.h();
  return out;
}

inline SampledSequence discrete_convolution(const SampledSequence& w, const SampledSequence& v,
                                            ConvolutionPath path = ConvolutionPath::Auto) {
  return use_fast_path(path, w.grid().n_half()) ? convolve_fast(w, v) : convolve_direct(w, v);
}

// (Dw)_i = (w_{i+1} - w_{i-1}) / 2h, with w_{+-(N+1)} = 0.
inline SampledSequence central_difference(const SampledSequence& w) {
  const Grid& g = w.grid();
  SampledSequence out(g);
  const double inv = 1.0 / (2.0 * g.h());
  for (int i = w.first(); i <= w.last(); ++i) out[i] = (w.padded(i + 1) - w.padded(i - 1)) * inv;
  return out;
}

enum class Norm { L1, L2, Inf };

// ||w||_{l^p_h} = (sum h |w_i|^p)^{1/p}; the sup norm carries no h weight.
inline double lp_norm(std::span<const double> w, double h, Norm p) {
  switch (p) {
    case Norm::L1: {
      double s = 0.0;
      for (double x : w) s += std::abs(x);
      return h * s;
    }
    case Norm::L2: {
      double s = 0.0;
      for (double x : w) s += x * x;
      return std::sqrt(h * s);
    }
    case Norm::Inf: {
      double m = 0.0;
      for (double x : w) m = std::max(m, std::abs(x));
      return m;
    }
  }
  return 0.0;
}

inline double lp_norm(const SampledSequence& w, Norm p) { return lp_norm(w.values(), w.grid().h(), p); }

// |reference - sum_i h fn(x_i)| over the grid nodes.
template <typename F>
double quadrature_error_probe(F&& fn, const Grid& grid, double reference) {
  double s = 0.0;
  for (int i = -grid.n_half(); i <= grid.n_half(); ++i) s += fn(grid.x(i));
  return std::abs(reference - grid.h() * s);
}

// Least-squares slope of log(error) against log(h).
inline double observed_order(std::span<const double> hs, std::span<const double> errors) {
  if (hs.size() != errors.size() || hs.size() < 2) throw InvalidArgument("observed_order: need >= 2 paired samples");
  const auto n = static_cast<double>(hs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (!(hs[k] > 0.0) || !(errors[k] > 0.0)) throw DegenerateRate("observed_order: nonpositive h or error");
    const double x = std::log(hs[k]), y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw DegenerateRate("observed_order: all h equal");
  return (n * sxy - sx * sy) / den;
}

}  // namespace nlwave
