#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nlwave/experiments.hpp"

using namespace nlwave;

namespace {

StudyOptions quiet(unsigned workers = 1) {
  StudyOptions o;
  o.workers = workers;
  o.record_timing = false;
  return o;
}

ErrorRecord rec(double h, double e) {
  ErrorRecord r;
  r.h = h;
  r.linf_error = e;
  return r;
}

}  // namespace

TEST(LinfError, Examples) {
  const auto w = SolitaryWave::generalized_bbm(1, 1.8, 0.0);
  const Grid g(0.5, 20);
  EXPECT_EQ(linf_error(exact_state(w, g, 3.0), w, 3.0), 0.0);
  StateVector v = exact_state(w, g, 0.0);
  v[4] += 0.25;
  EXPECT_DOUBLE_EQ(linf_error(v, w, 0.0), 0.25);
}

TEST(ConvergenceRate, Examples) {
  EXPECT_NEAR(convergence_rate(rec(0.2, 4e-2), rec(0.1, 1e-2)).rho, 2.0, 1e-14);
  EXPECT_NEAR(convergence_rate(rec(0.4, 1e-3), rec(0.1, 2.5e-4)).rho, 1.0, 1e-14);
  EXPECT_THROW(convergence_rate(rec(0.2, 0.0), rec(0.1, 1e-3)), DegenerateRate);
  EXPECT_THROW(convergence_rate(rec(0.1, 1e-2), rec(0.1, 1e-3)), InvalidArgument);
}

TEST(ConvergenceRateProperty, RecoversPowerLaws) {
  for (double q : {0.5, 1.0, 2.0, 3.7})
    for (double h : {0.3, 0.05}) EXPECT_NEAR(convergence_rate(rec(h, 3 * std::pow(h, q)), rec(h / 3, 3 * std::pow(h / 3, q))).rho, q, 1e-12);
}

TEST(ProfileStudy, ZeroFinalTime) {
  const auto p = Problem::from_wave(SolitaryWave::generalized_bbm(1, 1.8, -18.0));
  const auto s = run_profile_study(p, Grid::from_domain(30.0, 0.25), 0.0, quiet());
  EXPECT_EQ(s.record.linf_error, 0.0);
  EXPECT_EQ(s.numeric_final, s.initial);
  ASSERT_TRUE(s.exact_final);
}

// First verified run: BBM, h = 0.25 on [-30, 30], x0 = -18, t = 20.
TEST(ProfileStudy, BbmGolden) {
  const auto p = Problem::from_wave(SolitaryWave::generalized_bbm(1, 1.8, -18.0));
  const auto s = run_profile_study(p, Grid::from_domain(30.0, 0.25), 20.0, quiet());
  double peak = 0.0;
  for (double x : s.numeric_final.values()) peak = std::max(peak, x);
  EXPECT_NEAR(peak, 1.2, 0.024);
  EXPECT_LT(s.record.linf_error, 0.06);
  EXPECT_GT(s.record.linf_error, 0.03);
}

TEST(Refinement, DegenerateWhenNothingHappens) {
  const auto p = Problem::from_wave(SolitaryWave::generalized_bbm(1, 1.8, 0.0));
  EXPECT_THROW(run_h_refinement(p, 10.0, {0.5, 0.25}, 0.0, quiet()), DegenerateRate);
}

TEST(Refinement, InputValidation) {
  const auto p = Problem::from_wave(SolitaryWave::generalized_bbm(1, 1.8, 0.0));
  EXPECT_THROW(run_h_refinement(p, 10.0, {}, 1.0, quiet()), InvalidArgument);
  EXPECT_THROW(run_h_refinement(p, 10.0, {0.25, 0.5}, 1.0, quiet()), InvalidArgument);
  EXPECT_THROW(run_h_refinement(p, 10.0, {0.3}, 1.0, quiet()), InvalidArgument);
}

TEST(Refinement, SingleEntryHasNoRate) {
  const auto p = Problem::from_wave(SolitaryWave::generalized_bbm(1, 1.8, 0.0));
  const auto s = run_h_refinement(p, 20.0, {0.5}, 1.0, quiet());
  ASSERT_EQ(s.records.size(), 1u);
  ASSERT_EQ(s.rates.size(), 1u);
  EXPECT_FALSE(s.rates[0]);
}

TEST(Refinement, BbmShortRunIsSecondOrder) {
  const auto p = Problem::from_wave(SolitaryWave::generalized_bbm(1, 1.8, -5.0));
  const auto s = run_h_refinement(p, 30.0, {0.4, 0.2, 0.1}, 5.0, quiet());
  for (std::size_t k = 1; k < s.rates.size(); ++k) {
    ASSERT_TRUE(s.rates[k]);
    EXPECT_NEAR(s.rates[k]->rho, 2.0, 0.2);
    // the reported rate is exactly the formula applied to the records
    EXPECT_EQ(s.rates[k]->rho, convergence_rate(s.records[k - 1], s.records[k]).rho);
  }
  EXPECT_FALSE(s.self_refined);
}

TEST(Refinement, WorkerCountDoesNotChangeResults) {
  const auto p = Problem::from_wave(SolitaryWave::rosenau(-1.0));
  const auto a = run_h_refinement(p, 12.0, {0.4, 0.2, 0.1}, 2.0, quiet(1));
  const auto b = run_h_refinement(p, 12.0, {0.4, 0.2, 0.1}, 2.0, quiet(3));
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].linf_error, b.records[k].linf_error);
    EXPECT_EQ(a.runs[k].trajectory.final_state(), b.runs[k].trajectory.final_state());
  }
}

TEST(Refinement, SelfRefinementWithoutExactSolution) {
  Problem p{bbm_kernel(), Nonlinearity::generalized_bbm(1), std::nullopt,
            [](double x) { return 0.8 / std::pow(std::cosh(0.5 * x), 2); }};
  const auto s = run_h_refinement(p, 20.0, {0.4, 0.2}, 3.0, quiet());
  EXPECT_TRUE(s.self_refined);
  ASSERT_TRUE(s.rates[1]);
  EXPECT_GT(s.records[0].linf_error, s.records[1].linf_error);
  // differences against h_min/2 behave like (1 - 4^{-k}) C h^2
  EXPECT_GT(s.rates[1]->rho, 1.7);
}

TEST(Truncation, ExteriorAmplitude) {
  const auto w = SolitaryWave::generalized_bbm(1, 1.8, -18.0);
  EXPECT_DOUBLE_EQ(exterior_amplitude(w, 30.0, 20.0), w(30.0, 20.0));
  EXPECT_DOUBLE_EQ(exterior_amplitude(w, 10.0, 20.0), 1.2);
}

TEST(Truncation, PlateauDetection) {
  std::vector<TruncationRecord> recs(5);
  const double errs[] = {1.0, 0.3, 0.1, 0.095, 0.094};
  for (int k = 0; k < 5; ++k) {
    recs[k].record.n_half = 10 * (k + 1);
    recs[k].record.linf_error = errs[k];
  }
  EXPECT_EQ(detect_plateau(recs), 40);
  recs.resize(3);
  EXPECT_FALSE(detect_plateau(recs));
}

TEST(Truncation, SingleEntryAndValidation) {
  const auto p = Problem::from_wave(SolitaryWave::generalized_bbm(1, 1.8, 0.0));
  const auto s = run_truncation_study(p, 0.5, {40}, 1.0, quiet());
  ASSERT_EQ(s.records.size(), 1u);
  EXPECT_FALSE(s.plateau_onset);
  EXPECT_THROW(run_truncation_study(p, 0.5, {}, 1.0, quiet()), InvalidArgument);
  EXPECT_THROW(run_truncation_study(p, 0.5, {40, 30}, 1.0, quiet()), InvalidArgument);
  EXPECT_THROW(run_truncation_study(Problem::from_wave(SolitaryWave::generalized_bbm(1, 1.8, -30.0)), 0.5, {40}, 1.0,
                                    quiet()),
               InvalidArgument);
}

// Coarse version of the N sweep: errors fall, then settle on the
// discretization error of a wide domain at the same h.
TEST(Truncation, DecreasesThenPlateaus) {
  const auto w = SolitaryWave::generalized_bbm(1, 1.8, -6.0);
  const auto p = Problem::from_wave(w);
  const double h = 0.25;
  const std::vector<int> ns{40, 50, 60, 70, 80, 100, 120, 160};
  const auto s = run_truncation_study(p, h, ns, 8.0, quiet());
  ASSERT_TRUE(s.plateau_onset);
  std::size_t k = 1;
  for (; ns[k] < *s.plateau_onset; ++k) EXPECT_LT(s.records[k].record.linf_error, s.records[k - 1].record.linf_error);
  const double wide = run_single(p, Grid(h, 240), 8.0, quiet()).record.linf_error;
  EXPECT_NEAR(s.records.back().record.linf_error, wide, 0.01 * wide);
  for (; k < ns.size(); ++k) EXPECT_NEAR(s.records[k].record.linf_error, wide, 0.1 * wide);
  for (std::size_t j = 1; j < s.records.size(); ++j) EXPECT_LE(s.records[j].delta, s.records[j - 1].delta);
}

TEST(Truncation, SelfReferenceWithoutExactSolution) {
  Problem p{bbm_kernel(), Nonlinearity::generalized_bbm(1), std::nullopt,
            [](double x) { return 0.5 / std::pow(std::cosh(0.5 * x), 2); }};
  const auto s = run_truncation_study(p, 0.5, {20, 40, 80}, 2.0, quiet());
  EXPECT_EQ(s.records.back().record.linf_error, 0.0);
  EXPECT_GT(s.records.front().record.linf_error, s.records[1].record.linf_error);
}

TEST(DecayRun, BbmEnvelopeCalibratedAtStart) {
  const auto p = Problem::from_wave(SolitaryWave::generalized_bbm(1, 1.8, 0.0));
  StudyOptions o = quiet();
  o.decay = DecayCheckOptions{0.9, std::nullopt};
  o.snapshots = {1.0, 2.0};
  const auto r = run_single(p, Grid::from_domain(30.0, 0.25), 3.0, o);
  ASSERT_TRUE(r.envelope);
  ASSERT_EQ(r.decay.size(), 4u);
  EXPECT_TRUE(r.decay.front().report.holds);
  EXPECT_NEAR(r.decay.front().report.worst_ratio, 1.0, 1e-14);
}
