#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "nlwave/analytic.hpp"
#include "nlwave/system.hpp"
#include "oracles.hpp"

using namespace nlwave;
using nlwave::testing::random_vector;
using nlwave::testing::simpson;

TEST(Stencil, BbmAtUnitSpacing) {
  const TruncatedSystem sys(bbm_kernel(), Grid(1.0, 4), Nonlinearity::linear());
  EXPECT_EQ(sys.stencil_at(0), 0.0);
  EXPECT_DOUBLE_EQ(sys.stencil_at(1), (0.5 * std::exp(-2.0) - 0.5) / 2.0);
  EXPECT_EQ(sys.stencil().size(), 17u);
}

TEST(Stencil, BbmNormAtQuarterSpacing) {
  const TruncatedSystem sys(bbm_kernel(), Grid::from_domain(30.0, 0.25), Nonlinearity::linear());
  EXPECT_LE(sys.stencil_norm(), 1.0);
  // telescopes along the even and odd node chains: (beta(0) + beta(h)) up to the far tail
  EXPECT_NEAR(sys.stencil_norm(), (1.0 + std::exp(-0.25)) / 2.0, 1e-12);
}

TEST(StencilProperty, Antisymmetric) {
  for (const Kernel& k : {bbm_kernel(), rosenau_kernel()}) {
    const TruncatedSystem sys(k, Grid(0.17, 25), Nonlinearity::linear());
    for (int lag = 0; lag <= 50; ++lag) EXPECT_EQ(sys.stencil_at(lag), -sys.stencil_at(-lag));
  }
}

TEST(Stencil, DeterministicConstruction) {
  const Grid g(0.1, 50);
  const TruncatedSystem a(rosenau_kernel(), g, Nonlinearity::rosenau_quintic());
  const TruncatedSystem b(rosenau_kernel(), g, Nonlinearity::rosenau_quintic());
  ASSERT_EQ(a.stencil().size(), b.stencil().size());
  for (std::size_t k = 0; k < a.stencil().size(); ++k) EXPECT_EQ(a.stencil()[k], b.stencil()[k]);
}

TEST(System, RejectsInconsistentKernelMetadata) {
  // a hat function has |mu| = 2; claiming 0.5 must be caught
  const Kernel bad = tabulated_kernel({-1, 0, 1}, {0, 1, 0}, 0.5, Smoothness::OrderOne);
  EXPECT_THROW(TruncatedSystem(bad, Grid(0.1, 20), Nonlinearity::linear()), InvalidArgument);
  EXPECT_THROW(TruncatedSystem(bbm_kernel(), Grid(0.1, 20), Nonlinearity::linear(), 0.0), InvalidArgument);
}

TEST(Rhs, ZeroStateGivesZero) {
  const TruncatedSystem sys(bbm_kernel(), Grid(0.2, 10), Nonlinearity::generalized_bbm(1));
  const auto d = sys.rhs(StateVector(sys.grid()));
  for (double x : d.values()) EXPECT_EQ(x, 0.0);
}

TEST(Rhs, SingleEntryPicksStencilColumn) {
  const Grid g(0.5, 6);
  const TruncatedSystem sys(bbm_kernel(), g, Nonlinearity::linear(), kDefaultBlowUpThreshold, ConvolutionPath::Direct);
  StateVector v(g);
  v[2] = 1.0;
  const auto d = sys.rhs(v);
  for (int i = g.first(); i <= g.last(); ++i) EXPECT_DOUBLE_EQ(d[i], -g.h() * sys.stencil_at(i - 2));
}

TEST(Rhs, FastPathMatchesDirect) {
  for (const Kernel& k : {bbm_kernel(), rosenau_kernel()}) {
    const Grid g(0.1, 64);
    const TruncatedSystem fast(k, g, Nonlinearity({{1, 1.0}, {2, 1.0}}), kDefaultBlowUpThreshold, ConvolutionPath::Fast);
    ASSERT_TRUE(fast.uses_fast_path());
    const auto v = random_vector(g.size(), 5);
    std::vector<double> a(g.size()), b(g.size());
    fast.rhs(v, a);
    fast.rhs_direct(v, b);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(Rhs, AutoPathSwitchesAtThreshold) {
  EXPECT_FALSE(TruncatedSystem(bbm_kernel(), Grid(0.1, kFastConvolutionMinN - 1), Nonlinearity::linear()).uses_fast_path());
  EXPECT_TRUE(TruncatedSystem(bbm_kernel(), Grid(0.1, kFastConvolutionMinN), Nonlinearity::linear()).uses_fast_path());
}

TEST(Rhs, BlowUpGuard) {
  const Grid g(0.5, 4);
  const TruncatedSystem sys(bbm_kernel(), g, Nonlinearity::generalized_bbm(1), 10.0);
  StateVector v(g);
  v[1] = 11.0;
  EXPECT_THROW(sys.rhs(v), BlowUp);
  std::vector<double> raw(g.size(), 0.0), out(g.size());
  raw[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(sys.rhs(raw, out), BlowUp);
  EXPECT_THROW(sys.rhs(StateVector(Grid(0.5, 5))), GridMismatch);
}

TEST(RhsProperty, LinearInNonlinearity) {
  const Grid g(0.25, 30);
  const auto v = random_vector(g.size(), 9, -0.5, 0.5);
  const TruncatedSystem s1(rosenau_kernel(), g, Nonlinearity({{1, 1.0}, {3, 2.0}}));
  const TruncatedSystem s2(rosenau_kernel(), g, Nonlinearity({{2, -1.5}}));
  const TruncatedSystem s12(rosenau_kernel(), g, Nonlinearity({{1, 1.0}, {2, -1.5}, {3, 2.0}}));
  std::vector<double> a(g.size()), b(g.size()), c(g.size());
  s1.rhs(v, a);
  s2.rhs(v, b);
  s12.rhs(v, c);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i] + b[i], c[i], 1e-13);
}

// h * sum_i rhs_i telescopes to boundary terms of the sampled kernel.
TEST(RhsProperty, MassChangeIsBoundaryFlux) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Grid g(0.2, 20);
    const auto v = random_vector(g.size(), seed);
    const TruncatedSystem sys(bbm_kernel(), g, Nonlinearity::generalized_bbm(2), kDefaultBlowUpThreshold,
                              ConvolutionPath::Direct);
    std::vector<double> d(g.size());
    sys.rhs(v, d);
    double dm = 0.0;
    for (double x : d) dm += g.h() * x;
    // sum_i (beta((i-j+1)h) - beta((i-j-1)h)) / 2h over i = -N..N collapses
    const Kernel k = bbm_kernel();
    const int n = g.n_half();
    double flux = 0.0;
    for (int j = -n; j <= n; ++j) {
      const double fj = sys.nonlinearity()(v[static_cast<std::size_t>(j + n)]);
      const double tel = k((n + 1 - j) * g.h()) + k((n - j) * g.h()) - k((-n - j) * g.h()) - k((-n - 1 - j) * g.h());
      flux += g.h() * fj * tel / (2 * g.h());
    }
    EXPECT_NEAR(dm, -g.h() * flux, 1e-13);
  }
}

TEST(Nonlinearity, EvaluatesAndParses) {
  const auto f = Nonlinearity::generalized_bbm(1);
  EXPECT_EQ(f(2.0), 6.0);
  EXPECT_EQ(f(0.0), 0.0);
  const auto r = Nonlinearity::rosenau_quintic();
  EXPECT_DOUBLE_EQ(r(1.0), 3.0);
  const auto p = Nonlinearity::parse("3:-10, 1:1,5:12");
  for (double u : {-1.3, -0.2, 0.0, 0.7}) EXPECT_DOUBLE_EQ(p(u), r(u));
  EXPECT_NEAR(r.max_abs_on(0.1), 0.1 - 0.01 + 0.00012, 1e-12);
  for (const char* bad : {"", "1", "0:1", "a:1", "1:b", "1:1:2", "2:1x"}) EXPECT_THROW(Nonlinearity::parse(bad), ConfigError) << bad;
  EXPECT_THROW(Nonlinearity({{0, 1.0}}), InvalidArgument);
}

TEST(ApplyNonlinearity, Examples) {
  const Grid g(1.0, 1);
  const auto out = apply_nonlinearity(Nonlinearity::generalized_bbm(1), StateVector(g, {-1.0, 0.5, 2.0}));
  EXPECT_EQ(out.vector(), (std::vector<double>{0.0, 0.75, 6.0}));
  EXPECT_THROW(apply_nonlinearity(Nonlinearity({{5, 1.0}}), StateVector(g, {0.0, 1e80, 0.0})), BlowUp);
}

TEST(Mass, Examples) {
  EXPECT_DOUBLE_EQ(discrete_mass(StateVector(Grid(0.5, 1), {1, 2, 3})), 3.0);
  const auto wave = SolitaryWave::generalized_bbm(1, 1.8, 0.0);
  const Grid g = Grid::from_domain(30.0, 0.25);
  const double oracle = 2 * simpson([&](double x) { return wave(x, 0.0); }, 0.0, 60.0, 20000);
  EXPECT_NEAR(oracle, 7.2, 1e-8);
  EXPECT_NEAR(discrete_mass(initial_data(wave, g)), 7.2, 1e-6);
}

TEST(Mass, BoundaryBand) {
  const StateVector v(Grid(1.0, 3), {0.1, -0.4, 0, 5, 0, 0.2, -0.3});
  EXPECT_EQ(boundary_band_amplitude(v, 1), 0.3);
  EXPECT_EQ(boundary_band_amplitude(v, 2), 0.4);
  EXPECT_EQ(boundary_band_amplitude(v, 10), 5.0);
}
