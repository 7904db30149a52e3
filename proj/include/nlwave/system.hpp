#pragma once

// The truncated semi-discrete system
//
//   dv_i/dt = -sum_{j=-N}^{N} h (D beta_h)(x_i - x_j) f(v_j),   -N <= i <= N,
//
// with the central difference moved onto the sampled kernel. The stencil
// (D beta_h)_k is precomputed for every lag k in [-2N, 2N].

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/discrete_ops.hpp"
#include "nlwave/error.hpp"
#include "nlwave/fft_convolver.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/kernel.hpp"

namespace nlwave {

// f(u) = sum_k c_k u^{p_k} with every p_k >= 1, so f(0) = 0.
class Nonlinearity {
 public:
  struct Term {
    int power = 1;
    double coefficient = 0.0;
  };

  Nonlinearity() = default;
  explicit Nonlinearity(std::vector<Term> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (t.power < 1) throw InvalidArgument("nonlinearity: powers must be >= 1 (f(0) = 0)");
      if (!std::isfinite(t.coefficient)) throw InvalidArgument("nonlinearity: non-finite coefficient");
    }
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.power < b.power; });
  }

  // f(u) = u + u^{p+1}
  static Nonlinearity generalized_bbm(int p) {
    if (p < 1) throw InvalidArgument("nonlinearity: BBM power p must be >= 1");
    return Nonlinearity({{1, 1.0}, {p + 1, 1.0}});
  }
  static Nonlinearity linear(double a = 1.0) { return Nonlinearity({{1, a}}); }
  // f(u) = u - 10u^3 + 12u^5, which carries the sech solitary wave.
  static Nonlinearity rosenau_quintic() { return Nonlinearity({{1, 1.0}, {3, -10.0}, {5, 12.0}}); }

  // Parses "power:coefficient" pairs separated by commas, e.g. "1:1, 3:-10".
  static Nonlinearity parse(const std::string& text) {
    std::vector<Term> terms;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("nonlinearity: expected power:coefficient, got '" + item + "'");
      try {
        std::size_t used = 0;
        const std::string ps = item.substr(0, colon), cs = item.substr(colon + 1);
        const int power = std::stoi(ps, &used);
        if (ps.find_first_not_of(" \t", used) != std::string::npos) throw ConfigError("bad power");
        const double coef = std::stod(cs, &used);
        if (cs.find_first_not_of(" \t", used) != std::string::npos) throw ConfigError("bad coefficient");
        terms.push_back({power, coef});
      } catch (const std::exception&) {
        throw ConfigError("nonlinearity: cannot parse term '" + item + "'");
      }
    }
    if (terms.empty()) throw ConfigError("nonlinearity: no terms");
    try {
      return Nonlinearity(std::move(terms));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }

  const std::vector<Term>& terms() const noexcept { return terms_; }

  double operator()(double u) const noexcept {
    double acc = 0.0, pw = 1.0;
    int k = 0;
    for (const auto& t : terms_) {
      while (k < t.power) {
        pw *= u;
        ++k;
      }
      acc += t.coefficient * pw;
    }
    return acc;
  }

  // max_{|z| <= delta} |f(z)|, by dense sampling of [-delta, delta].
  double max_abs_on(double delta, int samples = 4001) const {
    if (!(delta > 0.0)) return 0.0;
    double m = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double z = -delta + 2.0 * delta * k / (samples - 1);
      m = std::max(m, std::abs((*this)(z)));
    }
    return m;
  }

 private:
  std::vector<Term> terms_;
};

inline constexpr double kDefaultBlowUpThreshold = 1e6;

// Entrywise f; throws BlowUp if any value overflows.
inline void apply_nonlinearity(const Nonlinearity& f, std::span<const double> v, std::span<double> out) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = f(v[k]);
    if (!std::isfinite(out[k])) throw BlowUp("nonlinearity produced a non-finite value");
  }
}

inline StateVector apply_nonlinearity(const Nonlinearity& f, const StateVector& state) {
  StateVector out(state.grid());
  apply_nonlinearity(f, state.values(), out.values());
  return out;
}

// sum_i h v_i
inline double discrete_mass(const StateVector& state) {
  double s = 0.0;
  for (double x : state.values()) s += x;
  return state.grid().h() * s;
}

// max |v_i| over the outermost `band` nodes on each side.
inline double boundary_band_amplitude(const StateVector& state, int band) {
  const int n = state.grid().n_half();
  band = std::clamp(band, 1, n + 1);
  double m = 0.0;
  for (int k = 0; k < band; ++k) m = std::max({m, std::abs(state[n - k]), std::abs(state[-n + k])});
  return m;
}

class TruncatedSystem {
 public:
  TruncatedSystem(const Kernel& kernel, Grid grid, Nonlinearity f, double blow_up_threshold = kDefaultBlowUpThreshold,
                  ConvolutionPath path = ConvolutionPath::Auto)
      : grid_(grid), f_(std::move(f)), threshold_(blow_up_threshold), path_(path), kernel_name_(kernel.name()) {
    if (!(blow_up_threshold > 0.0)) throw InvalidArgument("system: blow-up threshold must be positive");
    const int n = grid_.n_half();
    const double h = grid_.h();
    stencil_.resize(static_cast<std::size_t>(4 * n + 1));
    for (int k = -2 * n; k <= 2 * n; ++k) {
      const double hi = kernel((k + 1) * h), lo = kernel((k - 1) * h);
      if (!std::isfinite(hi) || !std::isfinite(lo))
        throw InvalidArgument("system: kernel not finite near lag " + std::to_string(k));
      stencil_[static_cast<std::size_t>(k + 2 * n)] = (hi - lo) / (2.0 * h);
    }
    stencil_norm_ = lp_norm(stencil_, h, Norm::L1);
    if (stencil_norm_ > kernel.derivative_total_variation() + 1e-10)
      throw InvalidArgument("system: stencil l1 norm " + std::to_string(stencil_norm_) + " exceeds |mu|(R) = " +
                            std::to_string(kernel.derivative_total_variation()) + "; kernel metadata is inconsistent");
    if (use_fast_path(path_, n))
      fft_ = std::make_shared<const FftConvolver>(stencil_, next_power_of_two(grid_.size() * 2 - 1));
  }

  const Grid& grid() const noexcept { return grid_; }
  const Nonlinearity& nonlinearity() const noexcept { return f_; }
  double blow_up_threshold() const noexcept { return threshold_; }
  const std::string& kernel_name() const noexcept { return kernel_name_; }
  bool uses_fast_path() const noexcept { return static_cast<bool>(fft_); }

  // (D beta_h) at lag k in [-2N, 2N], stored as a 4N+1 vector.
  std::span<const double> stencil() const noexcept { return stencil_; }
  double stencil_at(int lag) const { return stencil_.at(static_cast<std::size_t>(lag + 2 * grid_.n_half())); }
  // sum_k h |(D beta_h)_k|
  double stencil_norm() const noexcept { return stencil_norm_; }

  // out = -B^N f(v). Throws BlowUp when ||v||_inf exceeds the threshold or a
  // non-finite value appears.
  void rhs(std::span<const double> v, std::span<double> out) const {
    const std::size_t m = grid_.size();
    if (v.size() != m || out.size() != m) throw GridMismatch("rhs: state length does not match grid");
    for (double x : v)
      if (!(std::abs(x) <= threshold_)) throw BlowUp("rhs: sup-norm of state exceeds blow-up threshold");

    std::vector<double> fv(m);
    apply_nonlinearity(f_, v, fv);
    const double h = grid_.h();
    if (fft_) {
      fft_->apply(fv, static_cast<std::size_t>(2 * grid_.n_half()), out);
      for (double& x : out) x *= -h;
    } else {
      direct_sum(fv, out);
    }
    for (double x : out)
      if (!std::isfinite(x)) throw BlowUp("rhs: non-finite derivative");
  }

  StateVector rhs(const StateVector& state) const {
    if (!(state.grid() == grid_)) throw GridMismatch("rhs: state is on a different grid");
    StateVector out(grid_);
    rhs(state.values(), out.values());
    return out;
  }

  // Direct double loop, regardless of the configured path.
  void rhs_direct(std::span<const double> v, std::span<double> out) const {
    std::vector<double> fv(v.size());
    apply_nonlinearity(f_, v, fv);
    direct_sum(fv, out);
  }

 private:
  void direct_sum(std::span<const double> fv, std::span<double> out) const {
    const auto m = static_cast<std::ptrdiff_t>(grid_.size());
    const double h = grid_.h();
    // stencil index of lag i - j is (i - j + 2N) = ii - jj + (m - 1) with ii, jj flat
    for (std::ptrdiff_t ii = 0; ii < m; ++ii) {
      const double* s = stencil_.data() + ii + (m - 1);
      double acc = 0.0;
      for (std::ptrdiff_t jj = 0; jj < m; ++jj) acc += s[-jj] * fv[static_cast<std::size_t>(jj)];
      out[static_cast<std::size_t>(ii)] = -h * acc;
    }
  }

  Grid grid_;
  Nonlinearity f_;
  double threshold_;
  ConvolutionPath path_;
  std::string kernel_name_;
  std::vector<double> stencil_;
  double stencil_norm_ = 0.0;
  std::shared_ptr<const FftConvolver> fft_;
};

inline TruncatedSystem build_system(const Kernel& kernel, const Grid& grid, Nonlinearity f,
                                    double blow_up_threshold = kDefaultBlowUpThreshold,
                                    ConvolutionPath path = ConvolutionPath::Auto) {
  return TruncatedSystem(kernel, grid, std::move(f), blow_up_threshold, path);
}

}  // namespace nlwave
