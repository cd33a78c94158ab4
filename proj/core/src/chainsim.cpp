#include "lossguard/chainsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "lossguard/losscode.hpp"

namespace lossguard::chainsim {

namespace {

constexpr std::int64_t kChunkSize = 1024;
constexpr std::uint64_t kInputStreamIndex = ~std::uint64_t{0};

// Runs body(chunk_index, begin, end) over [0, trials) in fixed-size chunks.
// Chunk boundaries do not depend on the thread count.
template <typename Body>
void for_each_chunk(std::int64_t trials, int threads, Body&& body) {
  const std::int64_t chunks = (trials + kChunkSize - 1) / kChunkSize;
  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(chunks, 1)));
  std::atomic<std::int64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto work = [&] {
    try {
      for (std::int64_t c = next++; c < chunks; c = next++) {
        body(c, c * kChunkSize, std::min(trials, (c + 1) * kChunkSize));
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = chunks;
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

struct ChainPartial {
  std::int64_t successes = 0;
  std::int64_t stage_attempts = 0;
  std::int64_t intact = 0;
  std::int64_t corrected = 0;
  std::int64_t failed_multi_loss = 0;
  std::int64_t failed_gates = 0;
  double fidelity_sum = 0.0;
  double fidelity_min = 1.0;
};

int resolve_threads(int requested) { return requested > 0 ? requested : default_thread_count(); }

}  // namespace

int default_thread_count() {
  if (const char* env = std::getenv("LOSSGUARD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void ChainConfig::validate() const {
  gate_model().validate();
  if (num_stages < 1) throw DomainError("num_stages must be at least 1");
  if (trials < 1) throw DomainError("trials must be at least 1");
  if (loop_cycle_cap < 1) throw DomainError("loop_cycle_cap must be at least 1");
  if (trials > max_stage_evaluations / num_stages) {
    throw DomainError("trials * num_stages exceeds the configured cap of " + std::to_string(max_stage_evaluations));
  }
  if (logical_input && logical_input->num_qubits() != losscode::kLogicalQubits) {
    throw DomainError("logical input must be a two-qubit state");
  }
}

channel::GateModel ChainConfig::gate_model() const { return {params, mode, policy, p_t_override}; }

PureState ChainConfig::input_state() const {
  if (logical_input) return *logical_input;
  auto rng = RandomStream::for_trial(seed, kInputStreamIndex);
  return PureState::random(losscode::kLogicalQubits, rng);
}

Estimate binomial_estimate(std::int64_t successes, std::int64_t samples) {
  if (samples <= 0) return {0.0, 0.0};
  const double p = static_cast<double>(successes) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

ChainStats run_chain(const ChainConfig& config) {
  config.validate();
  const auto segment = config.segment();
  const auto gates = config.gate_model();
  const PureState logical = config.input_state();
  const PureState encoded = losscode::encode(logical);

  const std::int64_t chunks = (config.trials + kChunkSize - 1) / kChunkSize;
  std::vector<ChainPartial> partials(static_cast<std::size_t>(chunks));

  for_each_chunk(config.trials, resolve_threads(config.threads), [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
    ChainPartial& part = partials[static_cast<std::size_t>(c)];
    for (std::int64_t t = begin; t < end; ++t) {
      auto rng = RandomStream::for_trial(config.seed, static_cast<std::uint64_t>(t));
      PureState state = encoded;
      bool alive = true;
      for (int s = 0; s < config.num_stages && alive; ++s) {
        auto result = channel::stage(state, segment, gates, rng);
        ++part.stage_attempts;
        switch (result.status) {
          case channel::StageStatus::intact: ++part.intact; break;
          case channel::StageStatus::corrected: ++part.corrected; break;
          case channel::StageStatus::failed_multi_loss: ++part.failed_multi_loss; break;
          case channel::StageStatus::failed_gates: ++part.failed_gates; break;
        }
        alive = channel::succeeded(result.status);
        if (alive) state = std::move(*result.state);
      }
      if (!alive) continue;
      const double fid = fidelity(logical, losscode::decode(state));
      ++part.successes;
      part.fidelity_sum += fid;
      part.fidelity_min = std::min(part.fidelity_min, fid);
    }
  });

  ChainStats stats;
  stats.trials = config.trials;
  double fidelity_sum = 0.0;
  double fidelity_min = 1.0;
  for (const auto& p : partials) {
    stats.successes += p.successes;
    stats.stage_attempts += p.stage_attempts;
    stats.intact += p.intact;
    stats.corrected += p.corrected;
    stats.failed_multi_loss += p.failed_multi_loss;
    stats.failed_gates += p.failed_gates;
    fidelity_sum += p.fidelity_sum;
    if (p.successes > 0) fidelity_min = std::min(fidelity_min, p.fidelity_min);
  }
  stats.per_stage_success = binomial_estimate(stats.intact + stats.corrected, stats.stage_attempts);
  stats.end_to_end_success = binomial_estimate(stats.successes, stats.trials);
  if (stats.successes > 0) {
    stats.mean_fidelity_given_success = fidelity_sum / static_cast<double>(stats.successes);
    stats.min_fidelity_given_success = fidelity_min;
  }
  const double length = static_cast<double>(config.num_stages) * config.params.d;
  if (stats.successes == 0) {
    stats.empirical_alpha_prime = std::numeric_limits<double>::infinity();
    stats.alpha_prime_infinite = true;
  } else if (length > 0.0) {
    stats.empirical_alpha_prime = -std::log(stats.end_to_end_success.value) / length;
  } else {
    stats.empirical_alpha_prime = std::numeric_limits<double>::quiet_NaN();
  }
  return stats;
}

Prediction predict(const ChainConfig& config) {
  config.validate();
  Prediction p;
  p.survival = analytics::survival_prob(config.params.alpha, config.params.d);
  p.p_f = analytics::p_f(p.survival);
  p.p_t = config.gate_model().success_probability();
  if (config.policy == channel::GatePolicy::every_stage) {
    p.stage_success = p.p_f * p.p_t;
  } else {
    const double s = p.survival;
    p.stage_success = s * s * s * s + 4.0 * s * s * s * (1.0 - s) * p.p_t;
  }
  p.end_to_end = std::pow(p.stage_success, config.num_stages);
  if (config.params.alpha > 0.0 && config.params.d > 0.0 && p.p_t > 0.0 &&
      config.policy == channel::GatePolicy::every_stage) {
    p.alpha_prime_effective =
        analytics::alpha_prime(config.params.alpha, config.params.d) - std::log(p.p_t) / config.params.d;
  } else if (config.params.d > 0.0 && p.stage_success > 0.0) {
    p.alpha_prime_effective = -std::log(p.stage_success) / config.params.d;
  } else {
    p.alpha_prime_effective = std::numeric_limits<double>::quiet_NaN();
  }
  return p;
}

LoopStats run_loop(const ChainConfig& config) {
  config.validate();
  const auto segment = config.segment();
  const auto gates = config.gate_model();
  const PureState encoded = losscode::encode(config.input_state());

  struct LoopPartial {
    double cycles_sum = 0.0;
    double cycles_sq_sum = 0.0;
    std::int64_t censored = 0;
  };
  const std::int64_t chunks = (config.trials + kChunkSize - 1) / kChunkSize;
  std::vector<LoopPartial> partials(static_cast<std::size_t>(chunks));

  for_each_chunk(config.trials, resolve_threads(config.threads), [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
    LoopPartial& part = partials[static_cast<std::size_t>(c)];
    for (std::int64_t t = begin; t < end; ++t) {
      auto rng = RandomStream::for_trial(config.seed, static_cast<std::uint64_t>(t));
      PureState state = encoded;
      std::int64_t cycles = 0;
      while (cycles < config.loop_cycle_cap) {
        auto result = channel::stage(state, segment, gates, rng);
        if (!channel::succeeded(result.status)) break;
        state = std::move(*result.state);
        ++cycles;
      }
      if (cycles >= config.loop_cycle_cap) ++part.censored;
      const auto k = static_cast<double>(cycles);
      part.cycles_sum += k;
      part.cycles_sq_sum += k * k;
    }
  });

  LoopStats stats;
  stats.trials = config.trials;
  double sum = 0.0;
  double sq = 0.0;
  for (const auto& p : partials) {
    sum += p.cycles_sum;
    sq += p.cycles_sq_sum;
    stats.censored += p.censored;
  }
  const auto n = static_cast<double>(config.trials);
  const double mean = sum / n;
  const double var = n > 1.0 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
  stats.mean_cycles = {mean, std::sqrt(var / n)};
  stats.censored_fraction = static_cast<double>(stats.censored) / n;

  const Prediction pred = predict(config);
  const double q = pred.stage_success;
  stats.cycle_success_probability = q;
  stats.analytic_mean_cycles = q < 1.0 ? q / (1.0 - q) : std::numeric_limits<double>::infinity();
  stats.implied_storage_time = mean * config.params.d / config.params.nu;
  const double x = config.params.x();
  if (x > 0.0 && q < 1.0 && q > 0.0) {
    const double r = -std::log(q) / (2.0 * x);
    stats.analytic_storage_time = analytics::improved_storage_time(config.params.alpha, config.params.nu, r);
  } else if (q <= 0.0) {
    stats.analytic_storage_time = 0.0;
  } else {
    stats.analytic_storage_time = std::numeric_limits<double>::infinity();
  }
  return stats;
}

ModeComparison compare_modes(const ChainConfig& config) {
  if (config.p_t_override) throw DomainError("mode comparison needs p_t derived from the parameters");
  ChainConfig agg = config;
  agg.mode = channel::GateFailureMode::aggregate;
  ChainConfig per = config;
  per.mode = channel::GateFailureMode::per_gate;

  ModeComparison cmp{run_chain(agg), run_chain(per), 0.0, true, {}};
  const auto& a = cmp.aggregate.end_to_end_success;
  const auto& b = cmp.per_gate.end_to_end_success;
  const double se = std::hypot(a.standard_error, b.standard_error);
  const double diff = a.value - b.value;
  cmp.z_score = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  cmp.agree = std::abs(cmp.z_score) <= kModeAgreementSigma;

  std::ostringstream msg;
  msg.precision(6);
  msg << "aggregate " << a.value << " +/- " << a.standard_error << ", per_gate " << b.value << " +/- "
      << b.standard_error << ", z = " << cmp.z_score;
  if (!cmp.agree) msg << " (bookkeeping error: modes disagree beyond " << kModeAgreementSigma << " sigma)";
  cmp.report = msg.str();
  return cmp;
}

}  // namespace lossguard::chainsim
