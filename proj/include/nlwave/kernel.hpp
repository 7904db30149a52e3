#pragma once

// Convolution kernels beta for u_t + (beta * f(u))_x = 0.
//
// A Kernel carries its point evaluation together with the measure data the
// error analysis needs: |mu|(R) for mu = beta', |nu|(R) for nu = beta'' when
// that is a finite measure, and the L1 norm. Point values follow the
// right-continuous convention beta(x) = mu((-inf, x]).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/error.hpp"

namespace nlwave {

// OrderTwo: beta in W^{1,1} with beta'' a finite measure, O(h^2) scheme.
// OrderOne: only beta' is a finite measure, O(h) scheme.
enum class Smoothness { OrderOne, OrderTwo };

inline int expected_order(Smoothness s) { return s == Smoothness::OrderTwo ? 2 : 1; }

struct KernelMetadata {
  double derivative_total_variation = 0.0;                // |mu|(R)
  std::optional<double> second_derivative_total_variation;  // |nu|(R)
  Smoothness smoothness = Smoothness::OrderOne;
  double l1_norm = 0.0;   // int |beta|
  double integral = 0.0;  // int beta, equal to the Fourier symbol at 0
};

class Kernel {
 public:
  using Function = std::function<double(double)>;

  Kernel(std::string name, Function f, KernelMetadata meta)
      : name_(std::move(name)), f_(std::make_shared<const Function>(std::move(f))), meta_(meta) {
    if (!(*f_)) throw InvalidArgument("kernel: empty evaluation function");
    if (!(meta_.derivative_total_variation >= 0.0) || !(meta_.l1_norm >= 0.0))
      throw InvalidArgument("kernel: metadata must be nonnegative");
    if (meta_.second_derivative_total_variation && !(*meta_.second_derivative_total_variation >= 0.0))
      throw InvalidArgument("kernel: |nu|(R) must be nonnegative");
    if (meta_.smoothness == Smoothness::OrderTwo && !meta_.second_derivative_total_variation)
      throw InvalidArgument("kernel: OrderTwo requires |nu|(R)");
  }

  double operator()(double x) const { return (*f_)(x); }
  double evaluate(double x) const { return (*f_)(x); }

  const std::string& name() const noexcept { return name_; }
  const KernelMetadata& metadata() const noexcept { return meta_; }
  double derivative_total_variation() const noexcept { return meta_.derivative_total_variation; }
  std::optional<double> second_derivative_total_variation() const noexcept {
    return meta_.second_derivative_total_variation;
  }
  Smoothness smoothness() const noexcept { return meta_.smoothness; }
  double l1_norm() const noexcept { return meta_.l1_norm; }
  double integral() const noexcept { return meta_.integral; }

 private:
  std::string name_;
  std::shared_ptr<const Function> f_;
  KernelMetadata meta_;
};

// beta(x) = exp(-|x|)/2, the Green's function of 1 - D^2 (BBM).
// beta' = -sign(x) beta, beta'' = beta - delta_0, so |mu| = 1 and |nu| = 2.
inline Kernel bbm_kernel() {
  KernelMetadata meta;
  meta.derivative_total_variation = 1.0;
  meta.second_derivative_total_variation = 2.0;
  meta.smoothness = Smoothness::OrderTwo;
  meta.l1_norm = 1.0;
  meta.integral = 1.0;
  return Kernel("bbm", [](double x) { return 0.5 * std::exp(-std::abs(x)); }, meta);
}

// Green's function of 1 + D^4 (Rosenau):
//   beta(x) = e^{-|x|/sqrt2} (cos(|x|/sqrt2) + sin(|x|/sqrt2)) / (2 sqrt2).
//
// beta changes sign, so ||beta||_1 > int beta = 1. The measure constants were
// obtained by adaptive quadrature at 30 digits over the lobes between
// consecutive zeros of the integrand; tests/test_kernel.cpp re-derives them.
// |mu| has the closed form coth(pi/2)/sqrt2.
inline Kernel rosenau_kernel() {
  KernelMetadata meta;
  meta.derivative_total_variation = 0.77098073426601684;
  meta.second_derivative_total_variation = 0.67391645446973523;
  meta.smoothness = Smoothness::OrderTwo;
  meta.l1_norm = 1.1400934670509761;
  meta.integral = 1.0;
  return Kernel(
      "rosenau",
      [](double x) {
        const double y = std::abs(x) / std::numbers::sqrt2;
        return std::exp(-y) * (std::cos(y) + std::sin(y)) / (2.0 * std::numbers::sqrt2);
      },
      meta);
}

// A jump of a tabulated kernel at node `at`: `left_value` is the left limit,
// the tabulated value is the (right-continuous) point value.
struct KernelJump {
  double at = 0.0;
  double left_value = 0.0;
};

namespace detail {

struct Table {
  std::vector<double> nodes;
  std::vector<double> values;       // right values at nodes
  std::vector<double> left_values;  // left limits at nodes (== values where continuous)

  double operator()(double x) const {
    if (!(x >= nodes.front()) || !(x < nodes.back())) return 0.0;
    // first node strictly greater than x; x lies in [nodes[k-1], nodes[k])
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const auto k = static_cast<std::size_t>(it - nodes.begin());
    const double x0 = nodes[k - 1], x1 = nodes[k];
    const double y0 = values[k - 1], y1 = left_values[k];
    if (x == x0) return y0;
    const double s = (x - x0) / (x1 - x0);
    return y0 + s * (y1 - y0);
  }
};

// Integral of |linear segment| between (x0,y0) and (x1,y1).
inline double abs_segment_integral(double x0, double y0, double x1, double y1) {
  const double w = x1 - x0;
  if ((y0 >= 0.0) == (y1 >= 0.0) || y0 == 0.0 || y1 == 0.0) return 0.5 * w * (std::abs(y0) + std::abs(y1));
  const double t = y0 / (y0 - y1);
  return 0.5 * w * (t * std::abs(y0) + (1.0 - t) * std::abs(y1));
}

}  // namespace detail

// Piecewise-linear kernel through (nodes, values), zero outside
// [nodes.front(), nodes.back()). At the last node the point value is the
// right limit 0, so a nonzero last value is an implicit jump.
//
// The L1 norm and integral are computed exactly from the table.
inline Kernel tabulated_kernel(std::vector<double> nodes, std::vector<double> values,
                               double derivative_total_variation, Smoothness smoothness,
                               std::optional<double> second_derivative_total_variation = std::nullopt,
                               std::vector<KernelJump> jumps = {}) {
  if (nodes.size() != values.size()) throw InvalidArgument("tabulated kernel: nodes/values length mismatch");
  if (nodes.size() < 2) throw InvalidArgument("tabulated kernel: need at least two nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i]) || !std::isfinite(values[i]))
      throw InvalidArgument("tabulated kernel: non-finite entry");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) throw InvalidArgument("tabulated kernel: nodes must be strictly increasing");
  }
  if (!(derivative_total_variation >= 0.0)) throw InvalidArgument("tabulated kernel: negative |mu|(R)");

  auto table = std::make_shared<detail::Table>();
  table->left_values = values;
  for (const auto& j : jumps) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), j.at);
    if (it == nodes.end() || *it != j.at) throw InvalidArgument("tabulated kernel: jump not at a node");
    if (!std::isfinite(j.left_value)) throw InvalidArgument("tabulated kernel: non-finite jump value");
    if (it == nodes.begin()) continue;  // left limit at the first node is always 0
    table->left_values[static_cast<std::size_t>(it - nodes.begin())] = j.left_value;
  }
  table->nodes = std::move(nodes);
  table->values = std::move(values);

  KernelMetadata meta;
  meta.derivative_total_variation = derivative_total_variation;
  meta.second_derivative_total_variation = second_derivative_total_variation;
  meta.smoothness = smoothness;
  const auto& t = *table;
  for (std::size_t k = 1; k < t.nodes.size(); ++k) {
    meta.l1_norm += detail::abs_segment_integral(t.nodes[k - 1], t.values[k - 1], t.nodes[k], t.left_values[k]);
    meta.integral += 0.5 * (t.nodes[k] - t.nodes[k - 1]) * (t.values[k - 1] + t.left_values[k]);
  }
  return Kernel("tabulated", [table](double x) { return (*table)(x); }, meta);
}

// Exact total variation of the tabulated function, i.e. |mu|(R) for the
// piecewise-linear interpolant including the jumps into and out of support.
inline double tabulated_total_variation(const std::vector<double>& values, const std::vector<KernelJump>& jumps,
                                        const std::vector<double>& nodes) {
  std::vector<double> left = values;
  for (const auto& j : jumps) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), j.at);
    if (it != nodes.end() && it != nodes.begin() && *it == j.at) left[static_cast<std::size_t>(it - nodes.begin())] = j.left_value;
  }
  double tv = std::abs(values.front()) + std::abs(left.back());
  for (std::size_t k = 1; k < values.size(); ++k) {
    tv += std::abs(left[k] - values[k - 1]);
    tv += std::abs(values[k] - left[k]);
  }
  return tv;
}

// Reads a two-column (abscissa, value) whitespace-delimited table; '#'
// starts a comment. An abscissa repeated on consecutive rows declares a jump:
// the first row is the left limit, the second the point value.
//
// |mu|(R) is computed exactly from the table. When the table is continuous
// and vanishes at both ends, |nu|(R) is the sum of slope changes and the
// kernel is declared OrderTwo; otherwise OrderOne.
inline Kernel load_tabulated_kernel(std::istream& in) {
  std::vector<double> nodes, values;
  std::vector<KernelJump> jumps;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    double x = 0.0, y = 0.0;
    if (!(ls >> x)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ConfigError("kernel file line " + std::to_string(lineno) + ": expected two numbers");
    }
    if (!(ls >> y)) throw ConfigError("kernel file line " + std::to_string(lineno) + ": expected two numbers");
    std::string rest;
    if (ls >> rest) throw ConfigError("kernel file line " + std::to_string(lineno) + ": trailing data");
    if (!nodes.empty() && x == nodes.back()) {
      if (!jumps.empty() && jumps.back().at == x)
        throw ConfigError("kernel file line " + std::to_string(lineno) + ": abscissa repeated more than twice");
      jumps.push_back({x, values.back()});
      values.back() = y;
      continue;
    }
    if (!nodes.empty() && x < nodes.back())
      throw ConfigError("kernel file line " + std::to_string(lineno) + ": abscissas must be increasing");
    nodes.push_back(x);
    values.push_back(y);
  }
  if (nodes.size() < 2) throw ConfigError("kernel file: need at least two rows");

  const double tv = tabulated_total_variation(values, jumps, nodes);
  std::optional<double> nu;
  Smoothness smoothness = Smoothness::OrderOne;
  if (jumps.empty() && values.front() == 0.0 && values.back() == 0.0) {
    double total = 0.0, prev_slope = 0.0;
    for (std::size_t k = 1; k < nodes.size(); ++k) {
      const double slope = (values[k] - values[k - 1]) / (nodes[k] - nodes[k - 1]);
      total += std::abs(slope - prev_slope);
      prev_slope = slope;
    }
    total += std::abs(prev_slope);
    nu = total;
    smoothness = Smoothness::OrderTwo;
  }
  try {
    return tabulated_kernel(std::move(nodes), std::move(values), tv, smoothness, nu, std::move(jumps));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("kernel file: ") + e.what());
  }
}

inline Kernel load_tabulated_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open kernel file '" + path + "'");
  return load_tabulated_kernel(in);
}

}  // namespace nlwave
