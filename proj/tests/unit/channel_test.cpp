#include "lossguard/channel.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "oracle.hpp"

using namespace lossguard;
using namespace lossguard::channel;

namespace {

// Binomial tolerance: `sigmas` standard errors of a proportion.
double band(double p, std::int64_t n, double sigmas = 3.0) { return sigmas * std::sqrt(p * (1.0 - p) / n); }

PureState random_codeword(RandomStream& rng) { return losscode::encode(PureState::random(2, rng)); }

GateModel fixed_gates(double p_t, GatePolicy policy = GatePolicy::every_stage) {
  GateModel g;
  g.p_t_override = p_t;
  g.policy = policy;
  return g;
}

}  // namespace

TEST(Segment, LosslessSegmentsKeepEveryPhoton) {
  RandomStream rng(1);
  for (const auto& model : {SegmentModel(0.0, 50.0), SegmentModel(0.2, 0.0)}) {
    for (int t = 0; t < 10000; ++t) ASSERT_EQ(transmit_segment(model, rng).num_lost(), 0);
  }
}

TEST(Segment, RejectsNegativeInputs) {
  EXPECT_THROW(SegmentModel(-0.1, 1.0), DomainError);
  EXPECT_THROW(SegmentModel(0.1, -1.0), DomainError);
}

TEST(Segment, HalfAttenuationSurvivesHalfTheTime) {
  RandomStream rng(2);
  const SegmentModel model(std::log(2.0), 1.0);
  const std::int64_t trials = 1'000'000;
  std::int64_t survived = 0;
  for (std::int64_t t = 0; t < trials; ++t) survived += transmit_segment(model, rng).survival_mask[0] ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(survived) / trials, 0.5, 3.0 * std::sqrt(0.25 / trials));
}

TEST(Segment, LossCountsFollowBinomialFour) {
  RandomStream rng(3);
  const SegmentModel model(0.2231435513142098, 1.0);  // survival 0.8
  const double p = model.survival_probability();
  const std::int64_t trials = 100'000;
  std::array<std::int64_t, 5> counts{};
  for (std::int64_t t = 0; t < trials; ++t) ++counts[static_cast<std::size_t>(transmit_segment(model, rng).num_lost())];
  double chi2 = 0.0;
  for (int k = 0; k <= 4; ++k) {
    const double binom = std::tgamma(5.0) / (std::tgamma(k + 1.0) * std::tgamma(5.0 - k));
    const double expected = trials * binom * std::pow(1.0 - p, k) * std::pow(p, 4 - k);
    chi2 += std::pow(counts[static_cast<std::size_t>(k)] - expected, 2) / expected;
  }
  // Upper 0.1% point of chi-square with 4 degrees of freedom.
  EXPECT_LT(chi2, 18.467);
}

TEST(LossEvent, Accessors) {
  const auto e = LossEvent::single_loss(2);
  EXPECT_EQ(e.num_lost(), 1);
  EXPECT_EQ(e.lost_position(), 2);
  EXPECT_THROW(LossEvent{}.lost_position(), DomainError);
  EXPECT_THROW(LossEvent::single_loss(4), DomainError);
}

TEST(Stage, LosslessLineIsAlwaysIntact) {
  RandomStream rng(4);
  const SegmentModel segment(0.0, 10.0);
  TransponderParams params;
  params.n = 3;
  const GateModel gates{params, GateFailureMode::aggregate, GatePolicy::on_loss_only, std::nullopt};
  for (int t = 0; t < 200; ++t) {
    const auto input = random_codeword(rng);
    const auto res = stage(input, segment, gates, rng);
    ASSERT_EQ(res.status, StageStatus::intact);
    EXPECT_NEAR(fidelity(*res.state, input), 1.0, 1e-12);
    EXPECT_FALSE(res.recovery.has_value());
  }
}

TEST(Stage, ForcedSingleLossOnLastRailIsCorrected) {
  RandomStream rng(5);
  const PureState input(4, oracle::kets({{1.0 / std::sqrt(2.0), "0110"}, {1.0 / std::sqrt(2.0), "1001"}}));
  for (int t = 0; t < 20; ++t) {
    const auto res = stage_with_event(input, LossEvent::single_loss(3), fixed_gates(1.0), rng);
    ASSERT_EQ(res.status, StageStatus::corrected);
    ASSERT_TRUE(res.recovery.has_value());
    EXPECT_NEAR(fidelity(*res.state, input), 1.0, 1e-10);
  }
}

TEST(Stage, TwoLossesAreFatal) {
  RandomStream rng(6);
  LossEvent e;
  e.survival_mask = {false, true, false, true};
  const auto res = stage_with_event(random_codeword(rng), e, fixed_gates(1.0), rng);
  EXPECT_EQ(res.status, StageStatus::failed_multi_loss);
  EXPECT_FALSE(res.state.has_value());
}

TEST(Stage, FailedGatesDestroyTheState) {
  RandomStream rng(7);
  const auto res = stage_with_event(random_codeword(rng), LossEvent::single_loss(0), fixed_gates(0.0), rng);
  EXPECT_EQ(res.status, StageStatus::failed_gates);
  EXPECT_FALSE(res.state.has_value());
}

TEST(Stage, RejectsInputOutsideCodeSpace) {
  RandomStream rng(8);
  EXPECT_THROW(stage(PureState::from_bits("0001"), SegmentModel(0.1, 1.0), fixed_gates(1.0), rng), DomainError);
  EXPECT_THROW(stage(PureState::from_bits("01"), SegmentModel(0.1, 1.0), fixed_gates(1.0), rng), DomainError);
}

TEST(Stage, SuccessRateWithGatesOnlyOnLoss) {
  RandomStream rng(9);
  const SegmentModel segment(0.05, 4.0);
  const double p = segment.survival_probability();
  const double p_t = 0.8;
  const double want = std::pow(p, 4) + 4.0 * std::pow(p, 3) * (1.0 - p) * p_t;
  const auto input = random_codeword(rng);
  const auto gates = fixed_gates(p_t, GatePolicy::on_loss_only);
  const std::int64_t trials = 100'000;
  std::int64_t ok = 0;
  for (std::int64_t t = 0; t < trials; ++t) ok += succeeded(stage(input, segment, gates, rng).status) ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(ok) / trials, want, band(want, trials));
}

TEST(Stage, SuccessRateWithGatesEveryStage) {
  RandomStream rng(10);
  const SegmentModel segment(0.05, 4.0);
  const double p_t = 0.8;
  const double want = analytics::p_f(segment.survival_probability()) * p_t;
  const auto input = random_codeword(rng);
  const auto gates = fixed_gates(p_t);
  const std::int64_t trials = 100'000;
  std::int64_t ok = 0;
  for (std::int64_t t = 0; t < trials; ++t) ok += succeeded(stage(input, segment, gates, rng).status) ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(ok) / trials, want, band(want, trials));
}

TEST(Stage, SurvivorsStayInCodeSpaceWithFidelityOne) {
  RandomStream rng(11);
  const SegmentModel segment(0.1, 3.0);
  for (int t = 0; t < 2000; ++t) {
    const auto input = random_codeword(rng);
    const auto res = stage(input, segment, fixed_gates(1.0), rng);
    if (!succeeded(res.status)) {
      EXPECT_GE(res.loss.num_lost(), 2);
      continue;
    }
    EXPECT_LE(res.loss.num_lost(), 1);
    EXPECT_EQ(res.status == StageStatus::corrected, res.loss.num_lost() == 1);
    EXPECT_TRUE(losscode::in_code_space(*res.state));
    EXPECT_NEAR(fidelity(*res.state, input), 1.0, 1e-10);
  }
}

TEST(Stage, SuccessIsNonIncreasingInSpacing) {
  // Analytic check on a grid, then a coarse statistical check.
  for (GatePolicy policy : {GatePolicy::every_stage, GatePolicy::on_loss_only}) {
    double prev = 1.0;
    for (double d = 0.0; d <= 100.0; d += 0.5) {
      const double p = analytics::survival_prob(0.05, d);
      const double s = policy == GatePolicy::every_stage
                           ? analytics::p_f(p) * 0.9
                           : std::pow(p, 4) + 4.0 * std::pow(p, 3) * (1.0 - p) * 0.9;
      EXPECT_LE(s, prev + 1e-15);
      prev = s;
    }
  }
  RandomStream rng(12);
  const auto input = random_codeword(rng);
  const std::int64_t trials = 20'000;
  double prev_rate = 1.0;
  for (double d : {1.0, 5.0, 10.0, 20.0}) {
    std::int64_t ok = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
      ok += succeeded(stage(input, SegmentModel(0.05, d), fixed_gates(0.95), rng).status) ? 1 : 0;
    }
    const double rate = static_cast<double>(ok) / trials;
    EXPECT_LT(rate, prev_rate + band(0.5, trials));
    prev_rate = rate;
  }
}

TEST(Gates, PerGateSamplingMatchesClosedForm) {
  RandomStream rng(13);
  GateModel g;
  g.mode = GateFailureMode::per_gate;
  g.params.n = 16;
  g.params.eta = 1.0 - 1e-5;
  const double want = analytics::p_t_full(g.params);
  EXPECT_NEAR(g.success_probability(), want, 1e-15);
  const std::int64_t trials = 100'000;
  std::int64_t ok = 0;
  for (std::int64_t t = 0; t < trials; ++t) ok += sample_transponder_success(g, rng) ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(ok) / trials, want, band(want, trials));
  EXPECT_NEAR(static_cast<double>(ok) / trials, 0.14, 0.01);
}

TEST(Gates, ImperfectComponentsInPerGateMode) {
  RandomStream rng(14);
  GateModel g;
  g.mode = GateFailureMode::per_gate;
  g.params.n = 40;
  g.params.p_one = 0.995;
  g.params.p_spg = 1.0 - 2e-5;
  g.params.eta = 1.0 - 1e-5;
  const double want = analytics::p_t_full(g.params);
  const std::int64_t trials = 100'000;
  std::int64_t ok = 0;
  for (std::int64_t t = 0; t < trials; ++t) ok += sample_transponder_success(g, rng) ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(ok) / trials, want, band(want, trials));
}

TEST(Gates, Validation) {
  GateModel g;
  g.p_t_override = 1.5;
  EXPECT_THROW(g.validate(), DomainError);
  g.p_t_override = 0.5;
  EXPECT_NO_THROW(g.validate());
  g.mode = GateFailureMode::per_gate;
  EXPECT_THROW(g.validate(), DomainError);
}

TEST(Gates, ModeAndStatusNames) {
  EXPECT_EQ(to_string(GateFailureMode::aggregate), "aggregate_pt");
  EXPECT_EQ(gate_failure_mode_from_string("per_gate"), GateFailureMode::per_gate);
  EXPECT_EQ(gate_failure_mode_from_string("aggregate_pt"), GateFailureMode::aggregate);
  EXPECT_THROW(gate_failure_mode_from_string("coins"), DomainError);
  EXPECT_EQ(to_string(StageStatus::failed_multi_loss), "failed_multi_loss");
}

TEST(RandomStreams, AllSucceedMatchesPower) {
  RandomStream rng(15);
  for (auto [count, p] : {std::pair<std::uint64_t, double>{10, 0.9}, {522, 0.999}, {5130, 1.0 - 1e-5}}) {
    const double want = std::pow(p, static_cast<double>(count));
    const std::int64_t trials = 100'000;
    std::int64_t ok = 0;
    for (std::int64_t t = 0; t < trials; ++t) ok += rng.all_succeed(count, p) ? 1 : 0;
    EXPECT_NEAR(static_cast<double>(ok) / trials, want, band(want, trials, 4.0)) << count;
  }
  EXPECT_TRUE(rng.all_succeed(1000, 1.0));
  EXPECT_FALSE(rng.all_succeed(1, 0.0));
  EXPECT_TRUE(rng.all_succeed(0, 0.0));
}

TEST(RandomStreams, TrialStreamsAreReproducibleAndDistinct) {
  auto a = RandomStream::for_trial(42, 7);
  auto b = RandomStream::for_trial(42, 7);
  auto c = RandomStream::for_trial(42, 8);
  const double ua = a.uniform();
  EXPECT_EQ(ua, b.uniform());
  EXPECT_NE(ua, c.uniform());
}
