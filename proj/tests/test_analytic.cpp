#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "nlwave/analytic.hpp"
#include "oracles.hpp"

using namespace nlwave;
using nlwave::testing::simpson;

TEST(SolitaryWave, BbmParameters) {
  const auto w = SolitaryWave::generalized_bbm(1, 1.8, -18.0);
  EXPECT_NEAR(w.amplitude(), 1.2, 1e-15);
  EXPECT_NEAR(w.width(), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(w(-18.0, 0.0), 1.2);
  EXPECT_DOUBLE_EQ(w(18.0, 20.0), 1.2);
  EXPECT_DOUBLE_EQ(w.mass(), 7.2);
  EXPECT_THROW(SolitaryWave::generalized_bbm(1, 1.0, 0.0), InvalidArgument);
  EXPECT_THROW(SolitaryWave::generalized_bbm(0, 1.5, 0.0), InvalidArgument);
}

TEST(SolitaryWave, HigherPowerMatchesQuadrature) {
  for (int p : {2, 3, 4}) {
    const auto w = SolitaryWave::generalized_bbm(p, 1.5, 0.0);
    EXPECT_NEAR(w(0.0, 0.0), std::pow((p + 2) * 0.25, 1.0 / p), 1e-14);
    const double oracle = 2 * simpson([&](double x) { return w(x, 0.0); }, 0.0, 400.0, 400000);
    EXPECT_NEAR(w.mass(), oracle, 1e-6) << p;
  }
}

TEST(SolitaryWave, RosenauProfile) {
  const auto w = SolitaryWave::rosenau(-2.5);
  EXPECT_DOUBLE_EQ(w(-2.5, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(w(2.5, 10.0), 1.0);
  EXPECT_DOUBLE_EQ(w(0.0, 0.0), 1.0 / std::cosh(2.5));
  EXPECT_DOUBLE_EQ(w.envelope_scale(), std::numbers::sqrt2);
  EXPECT_EQ(w.kernel().name(), "rosenau");
}

// The sech profile really is a travelling solution of the nonlocal equation:
// c u = beta * f(u) after integrating once. Check by quadrature at a few x.
TEST(SolitaryWave, RosenauSatisfiesProfileEquation) {
  const auto w = SolitaryWave::rosenau(0.0);
  const Kernel k = w.kernel();
  const Nonlinearity f = w.nonlinearity();
  for (double x : {0.0, 0.7, -1.9, 4.0}) {
    const double conv = simpson([&](double y) { return k(x - y) * f(w(y, 0.0)); }, -60.0, 60.0, 240000);
    EXPECT_NEAR(conv, w.speed() * w(x, 0.0), 1e-8) << x;
  }
}

TEST(SolitaryWave, BbmSatisfiesProfileEquation) {
  const auto w = SolitaryWave::generalized_bbm(2, 1.6, 0.0);
  const Kernel k = w.kernel();
  const Nonlinearity f = w.nonlinearity();
  for (double x : {0.0, 0.5, -3.0}) {
    auto integrand = [&](double y) { return k(x - y) * f(w(y, 0.0)); };
    // split at the kink y = x
    const double conv = simpson(integrand, -80.0, x, 200000) + simpson(integrand, x, 80.0, 200000);
    EXPECT_NEAR(conv, w.speed() * w(x, 0.0), 1e-8) << x;
  }
}

TEST(SolitaryWaveProperty, TravelsAtSpeedC) {
  const auto w = SolitaryWave::generalized_bbm(1, 1.8, -3.0);
  for (double t : {0.0, 1.0, 7.5})
    for (double x : {-10.0, 0.0, 2.3}) EXPECT_NEAR(w(x + w.speed() * t, t), w(x, 0.0), 1e-14);
}

TEST(SolitaryWaveProperty, TranslationEquivariant) {
  const auto w = SolitaryWave::rosenau(0.0);
  for (double a : {-4.0, 1.5}) {
    const auto s = w.shifted_to(a);
    for (double x : {-2.0, 0.0, 3.3}) EXPECT_NEAR(s(x + a, 0.4), w(x, 0.4), 1e-15);
  }
}

TEST(SolitaryWaveProperty, FasterWavesAreTallerAndNarrower) {
  double amp = 0.0, width = 0.0;
  for (double c : {1.1, 1.4, 1.8, 2.5}) {
    const auto w = SolitaryWave::generalized_bbm(1, c, 0.0);
    EXPECT_GT(w.amplitude(), amp);
    EXPECT_GT(w.width(), width);
    amp = w.amplitude();
    width = w.width();
  }
}

TEST(Decay, CheckExamples) {
  const Grid g(1.0, 2);
  const StateVector v(g, {std::exp(-1.8), std::exp(-0.9), 1.0, std::exp(-0.9), std::exp(-1.8)});
  const DecayEnvelope env{0.9, 1.0, 1.0};
  const auto rep = check_decay(v, env);
  EXPECT_TRUE(rep.holds);
  EXPECT_NEAR(rep.worst_ratio, 1.0, 1e-15);
  StateVector bad = v;
  bad[2] = 0.5;
  const auto r2 = check_decay(bad, env);
  EXPECT_FALSE(r2.holds);
  EXPECT_EQ(r2.worst_index, 2);
  EXPECT_THROW(check_decay(v, DecayEnvelope{1.2, 1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(check_decay(v, DecayEnvelope{0.9, 0.0, 1.0}), InvalidArgument);
}

TEST(Decay, CalibrationIsTight) {
  const auto w = SolitaryWave::generalized_bbm(1, 1.8, 0.0);
  const Grid g = Grid::from_domain(30.0, 0.1);
  const StateVector v = initial_data(w, g);
  const auto env = calibrate_envelope(v, 0.9, 1.0);
  const auto rep = check_decay(v, env);
  EXPECT_TRUE(rep.holds);
  EXPECT_NEAR(rep.worst_ratio, 1.0, 1e-14);
  // a slightly smaller constant must fail
  DecayEnvelope tighter = env;
  tighter.constant *= 0.999;
  EXPECT_FALSE(check_decay(v, tighter).holds);
}

TEST(Decay, ZeroStateHoldsTrivially) {
  const StateVector z(Grid(0.5, 10));
  const auto env = calibrate_envelope(z, 0.9, 1.0);
  EXPECT_GT(env.constant, 0.0);
  const auto rep = check_decay(z, env);
  EXPECT_TRUE(rep.holds);
  EXPECT_EQ(rep.worst_ratio, 0.0);
}
