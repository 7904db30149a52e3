#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/error.hpp"

namespace nlwave {

// Uniform grid x_i = i*h, -N <= i <= N.
class Grid {
 public:
  Grid(double h, int n_half) : h_(h), n_(n_half) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid: h must be positive and finite");
    if (n_half < 1) throw InvalidArgument("grid: N must be at least 1");
  }

  // Grid covering [-L, L]; L/h must be a positive integer (to 1e-9 relative).
  static Grid from_domain(double half_width, double h) {
    if (!(half_width > 0.0) || !(h > 0.0)) throw InvalidArgument("grid: domain and h must be positive");
    const double ratio = half_width / h;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * ratio)
      throw InvalidArgument("grid: domain half-width " + std::to_string(half_width) + " is not a multiple of h=" +
                            std::to_string(h));
    return Grid(h, static_cast<int>(n));
  }

  double h() const noexcept { return h_; }
  int n_half() const noexcept { return n_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(2 * n_ + 1); }
  int first() const noexcept { return -n_; }
  int last() const noexcept { return n_; }
  double x(int i) const noexcept { return i * h_; }
  double half_width() const noexcept { return n_ * h_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double h_;
  int n_;
};

// 2N+1 samples on a grid, addressed by signed index -N..N.
class SampledSequence {
 public:
  explicit SampledSequence(Grid grid) : grid_(grid), v_(grid.size(), 0.0) {}

  SampledSequence(Grid grid, std::vector<double> values) : grid_(grid), v_(std::move(values)) {
    if (v_.size() != grid_.size()) throw InvalidArgument("sequence: length does not match grid");
    for (double x : v_)
      if (!std::isfinite(x)) throw InvalidArgument("sequence: non-finite entry");
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return v_.size(); }
  int first() const noexcept { return -grid_.n_half(); }
  int last() const noexcept { return grid_.n_half(); }

  double operator[](int i) const { return v_[offset(i)]; }
  double& operator[](int i) { return v_[offset(i)]; }

  // Entry i, or 0 when i lies outside [-N, N].
  double padded(int i) const noexcept { return (i < first() || i > last()) ? 0.0 : v_[offset(i)]; }

  std::span<const double> values() const noexcept { return v_; }
  std::span<double> values() noexcept { return v_; }
  const std::vector<double>& vector() const noexcept { return v_; }

  friend bool operator==(const SampledSequence&, const SampledSequence&) = default;

 private:
  std::size_t offset(int i) const noexcept { return static_cast<std::size_t>(i + grid_.n_half()); }

  Grid grid_;
  std::vector<double> v_;
};

// The semi-discrete solution v^N(t) is a sampled sequence.
using StateVector = SampledSequence;

inline void require_same_grid(const SampledSequence& a, const SampledSequence& b, const char* what) {
  if (!(a.grid() == b.grid())) throw GridMismatch(std::string(what) + ": sequences live on different grids");
}

}  // namespace nlwave
