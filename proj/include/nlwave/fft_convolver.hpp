#pragma once

// Linear convolution against a fixed filter via real FFTs (FFTW).
//
// The filter spectrum is computed once. apply() is const and allocates its
// own transform buffers, so one convolver may be shared by many threads.
// Plans use FFTW_ESTIMATE, which makes them a deterministic function of the
// transform length and keeps results bit-reproducible across runs.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <new>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>

#include "nlwave/error.hpp"

namespace nlwave {

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace detail {

// FFTW's planner is not thread-safe; every plan create/destroy goes through it.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
struct FftwFree {
  void operator()(T* p) const noexcept { fftw_free(p); }
};
template <typename T>
using FftwArray = std::unique_ptr<T[], FftwFree<T>>;

inline FftwArray<double> alloc_real(std::size_t n) {
  auto* p = fftw_alloc_real(n);
  if (!p) throw std::bad_alloc();
  return FftwArray<double>(p);
}
inline FftwArray<fftw_complex> alloc_complex(std::size_t n) {
  auto* p = fftw_alloc_complex(n);
  if (!p) throw std::bad_alloc();
  return FftwArray<fftw_complex>(p);
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace detail

class FftConvolver {
 public:
  // transform_len must be a power of two no smaller than filter.size().
  FftConvolver(std::span<const double> filter, std::size_t transform_len)
      : len_(transform_len), filter_len_(filter.size()), spectrum_(detail::alloc_complex(transform_len / 2 + 1)) {
    if (len_ < 2 || (len_ & (len_ - 1)) != 0) throw InvalidArgument("fft: transform length must be a power of two");
    if (filter.size() > len_) throw InvalidArgument("fft: filter longer than transform");

    auto real = detail::alloc_real(len_);
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      forward_.reset(fftw_plan_dft_r2c_1d(static_cast<int>(len_), real.get(), spectrum_.get(), FFTW_ESTIMATE));
      inverse_.reset(fftw_plan_dft_c2r_1d(static_cast<int>(len_), spectrum_.get(), real.get(), FFTW_ESTIMATE));
    }
    if (!forward_ || !inverse_) throw Error("fft: plan creation failed");

    std::fill(real.get(), real.get() + len_, 0.0);
    std::copy(filter.begin(), filter.end(), real.get());
    fftw_execute_dft_r2c(forward_.get(), real.get(), spectrum_.get());
  }

  std::size_t transform_length() const noexcept { return len_; }

  // Writes out[k] = sum_j filter[offset + k - j] * input[j] (filter taken as
  // zero outside its range) for k < out.size(). The result is free of
  // circular wrap-around when
  //   offset + out.size() - 1 < transform_len  and
  //   offset + transform_len >= filter.size() + input.size() - 1.
  void apply(std::span<const double> input, std::size_t offset, std::span<double> out) const {
    if (input.size() > len_ || offset + out.size() > len_) throw InvalidArgument("fft: input does not fit transform");
    const std::size_t nc = len_ / 2 + 1;
    auto real = detail::alloc_real(len_);
    auto freq = detail::alloc_complex(nc);
    std::fill(real.get(), real.get() + len_, 0.0);
    std::copy(input.begin(), input.end(), real.get());
    fftw_execute_dft_r2c(forward_.get(), real.get(), freq.get());
    for (std::size_t k = 0; k < nc; ++k) {
      const double ar = spectrum_[k][0], ai = spectrum_[k][1];
      const double br = freq[k][0], bi = freq[k][1];
      freq[k][0] = ar * br - ai * bi;
      freq[k][1] = ar * bi + ai * br;
    }
    fftw_execute_dft_c2r(inverse_.get(), freq.get(), real.get());
    const double scale = 1.0 / static_cast<double>(len_);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = real[offset + k] * scale;
  }

 private:
  std::size_t len_;
  std::size_t filter_len_;
  detail::FftwArray<fftw_complex> spectrum_;
  detail::Plan forward_;
  detail::Plan inverse_;
};

}  // namespace nlwave
