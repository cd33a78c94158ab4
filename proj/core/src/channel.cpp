#include "lossguard/channel.hpp"

#include <algorithm>
#include <cmath>

namespace lossguard::channel {

SegmentModel::SegmentModel(double alpha_, double d_) : alpha(alpha_), d(d_) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("segment alpha must be finite and >= 0");
  if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("segment length must be finite and >= 0");
}

int LossEvent::num_lost() const {
  return static_cast<int>(std::count(survival_mask.begin(), survival_mask.end(), false));
}

int LossEvent::lost_position() const {
  if (num_lost() != 1) throw DomainError("lost_position needs exactly one loss");
  return static_cast<int>(std::find(survival_mask.begin(), survival_mask.end(), false) - survival_mask.begin());
}

LossEvent LossEvent::single_loss(int position) {
  if (position < 0 || position > 3) throw DomainError("loss position outside 0..3");
  LossEvent e;
  e.survival_mask[static_cast<std::size_t>(position)] = false;
  return e;
}

LossEvent transmit_segment(const SegmentModel& model, RandomStream& rng) {
  const double p = model.survival_probability();
  LossEvent e;
  for (bool& survived : e.survival_mask) survived = rng.bernoulli(p);
  return e;
}

std::string to_string(GateFailureMode mode) {
  return mode == GateFailureMode::aggregate ? "aggregate_pt" : "per_gate";
}

GateFailureMode gate_failure_mode_from_string(std::string_view text) {
  if (text == "aggregate_pt" || text == "aggregate") return GateFailureMode::aggregate;
  if (text == "per_gate") return GateFailureMode::per_gate;
  throw DomainError("unknown mode '" + std::string(text) + "' (expected aggregate_pt or per_gate)");
}

double GateModel::success_probability() const {
  if (p_t_override) return *p_t_override;
  return analytics::p_t_full(params);
}

void GateModel::validate() const {
  params.validate();
  if (p_t_override) {
    if (!(*p_t_override >= 0.0 && *p_t_override <= 1.0)) throw DomainError("p_t override must lie in [0, 1]");
    if (mode == GateFailureMode::per_gate) {
      throw DomainError("p_t override cannot be combined with per-gate sampling");
    }
  }
}

bool sample_transponder_success(const GateModel& model, RandomStream& rng) {
  if (model.mode == GateFailureMode::aggregate) return rng.bernoulli(model.success_probability());

  const auto count = analytics::resources(model.params.n, analytics::ReductionLevel::iii);
  // One photon per gun, and each of those photons must be detected: 10 + 32n
  // clicks out of the 10 + 32(n+1) installed detectors.
  const auto photons = static_cast<std::uint64_t>(count.spg);
  const double two_qubit = analytics::gate_success(model.params.n);
  for (std::int64_t g = 0; g < count.cz; ++g) {
    if (!rng.bernoulli(two_qubit)) return false;
  }
  for (std::int64_t g = 0; g < count.one_qubit; ++g) {
    if (!rng.bernoulli(model.params.p_one)) return false;
  }
  return rng.all_succeed(photons, model.params.p_spg) && rng.all_succeed(photons, model.params.eta);
}

std::string to_string(StageStatus status) {
  switch (status) {
    case StageStatus::intact: return "intact";
    case StageStatus::corrected: return "corrected";
    case StageStatus::failed_multi_loss: return "failed_multi_loss";
    case StageStatus::failed_gates: return "failed_gates";
  }
  return "?";
}

StageResult stage(const PureState& encoded, const SegmentModel& segment, const GateModel& gates,
                  RandomStream& rng) {
  return stage_with_event(encoded, transmit_segment(segment, rng), gates, rng);
}

StageResult stage_with_event(const PureState& encoded, const LossEvent& event, const GateModel& gates,
                             RandomStream& rng) {
  if (encoded.num_qubits() != losscode::kDataQubits) throw DomainError("stage expects a four-qubit state");
  if (!losscode::in_code_space(encoded)) throw DomainError("stage input is outside the code space");
  const int lost = event.num_lost();
  if (lost >= 2) return {StageStatus::failed_multi_loss, event, std::nullopt, std::nullopt};

  const bool run_gates = lost == 1 || gates.policy == GatePolicy::every_stage;
  if (run_gates && !sample_transponder_success(gates, rng)) {
    return {StageStatus::failed_gates, event, std::nullopt, std::nullopt};
  }
  if (lost == 0) return {StageStatus::intact, event, encoded, std::nullopt};

  auto outcome = losscode::recover_purified(encoded, event.lost_position(), rng);
  PureState state = outcome.corrected_state;
  return {StageStatus::corrected, event, std::move(state), std::move(outcome)};
}

}  // namespace lossguard::channel
