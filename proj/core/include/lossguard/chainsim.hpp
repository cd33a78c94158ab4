#pragma once

// Monte Carlo simulation of transponder chains and of the fiber-loop memory.
//
// Trials are independent: trial i draws from RandomStream::for_trial(seed, i)
// and trials are reduced in index order, so results are bit-identical for a
// given seed no matter how many worker threads run.

#include <cstdint>
#include <optional>
#include <string>

#include "lossguard/analytics.hpp"
#include "lossguard/channel.hpp"
#include "lossguard/simcore.hpp"

namespace lossguard::chainsim {

struct ChainConfig {
  TransponderParams params;
  int num_stages = 1;
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  channel::GateFailureMode mode = channel::GateFailureMode::aggregate;
  channel::GatePolicy policy = channel::GatePolicy::every_stage;
  /// Fixed transponder success probability (aggregate mode only).
  std::optional<double> p_t_override;
  /// Logical two-qubit input; a seeded Haar-random state when empty.
  std::optional<PureState> logical_input;
  /// Upper bound on trials * num_stages.
  std::int64_t max_stage_evaluations = 2'000'000'000;
  /// Loop runs stop a trial after this many cycles and count it as censored.
  std::int64_t loop_cycle_cap = 1'000'000;
  /// Worker threads; 0 means LOSSGUARD_THREADS or the hardware count.
  int threads = 0;

  void validate() const;
  channel::GateModel gate_model() const;
  channel::SegmentModel segment() const { return {params.alpha, params.d}; }
  /// The logical input used by the run.
  PureState input_state() const;
};

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// p-hat and sqrt(p-hat (1 - p-hat) / samples).
Estimate binomial_estimate(std::int64_t successes, std::int64_t samples);

struct ChainStats {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  std::int64_t stage_attempts = 0;
  std::int64_t intact = 0;
  std::int64_t corrected = 0;
  std::int64_t failed_multi_loss = 0;
  std::int64_t failed_gates = 0;

  /// Successful stages over attempted stages (a failed trial stops).
  Estimate per_stage_success;
  Estimate end_to_end_success;
  /// Empty when no trial succeeded.
  std::optional<double> mean_fidelity_given_success;
  std::optional<double> min_fidelity_given_success;
  /// -ln(end_to_end) / (num_stages d); +infinity with the flag set when no
  /// trial succeeded.
  double empirical_alpha_prime = 0.0;
  bool alpha_prime_infinite = false;
};

ChainStats run_chain(const ChainConfig& config);

/// Closed-form counterparts of ChainStats for the same configuration.
struct Prediction {
  double survival = 1.0;       // exp(-alpha d)
  double p_f = 1.0;
  double p_t = 1.0;
  double stage_success = 1.0;  // per the configured gate policy
  double end_to_end = 1.0;
  /// alpha'(alpha, d) - ln(p_t)/d; NaN when alpha or d is zero.
  double alpha_prime_effective = 0.0;
};

Prediction predict(const ChainConfig& config);

struct LoopStats {
  std::int64_t trials = 0;
  /// Whole cycles completed before the failing one. Censored trials count
  /// at the cap.
  Estimate mean_cycles;
  std::int64_t censored = 0;
  double censored_fraction = 0.0;
  /// Per-cycle success q and the geometric mean q / (1 - q).
  double cycle_success_probability = 0.0;
  double analytic_mean_cycles = 0.0;
  /// mean_cycles * d / nu.
  double implied_storage_time = 0.0;
  /// T_f / r with r = -ln(q) / (2x); +infinity for a lossless loop.
  double analytic_storage_time = 0.0;
};

LoopStats run_loop(const ChainConfig& config);

struct ModeComparison {
  ChainStats aggregate;
  ChainStats per_gate;
  /// Difference of end-to-end success in combined standard errors.
  double z_score = 0.0;
  bool agree = true;
  std::string report;
};

inline constexpr double kModeAgreementSigma = 4.0;

/// Runs the configuration in both gate-failure modes with the same seed.
ModeComparison compare_modes(const ChainConfig& config);

/// LOSSGUARD_THREADS if set to a positive integer, else the hardware count.
int default_thread_count();

}  // namespace lossguard::chainsim
