#pragma once

// One fiber segment followed by one transponder station.
//
// Loss is heralded: the station learns which rails lost their photon but
// nothing about the qubit values. A single loss is repaired by the
// loss-code recovery circuit; two or more losses are fatal. Gate failures
// in the linear-optics circuit are post-selected failures that destroy the
// state.

#include <array>
#include <optional>
#include <string>

#include "lossguard/analytics.hpp"
#include "lossguard/losscode.hpp"
#include "lossguard/random.hpp"
#include "lossguard/simcore.hpp"

namespace lossguard::channel {

struct SegmentModel {
  double alpha = 0.0;  // 1/km
  double d = 0.0;      // km

  SegmentModel(double alpha, double d);
  double survival_probability() const { return analytics::survival_prob(alpha, d); }
};

struct LossEvent {
  std::array<bool, 4> survival_mask{true, true, true, true};

  int num_lost() const;
  /// Index of the single lost rail; throws DomainError unless num_lost() == 1.
  int lost_position() const;
  static LossEvent single_loss(int position);
};

LossEvent transmit_segment(const SegmentModel& model, RandomStream& rng);

enum class GateFailureMode {
  /// One Bernoulli(p_t) coin per stage.
  aggregate,
  /// Individual coins for every counted component: 16 CZ gates, 38
  /// one-qubit gates, 10+32n photon guns and 10+32n detector clicks.
  per_gate,
};

std::string to_string(GateFailureMode mode);
GateFailureMode gate_failure_mode_from_string(std::string_view text);

/// Which stages pay the gate-failure cost.
enum class GatePolicy {
  /// The circuit runs at every station, so every stage succeeds with
  /// p_f * p_t overall.
  every_stage,
  /// Gates only fire when a loss has to be repaired: success is
  /// p^4 + 4 p^3 (1 - p) p_t.
  on_loss_only,
};

struct GateModel {
  TransponderParams params;
  GateFailureMode mode = GateFailureMode::aggregate;
  GatePolicy policy = GatePolicy::every_stage;
  /// Replaces p_t_full(params) in aggregate mode.
  std::optional<double> p_t_override;

  /// The transponder success probability this model samples from.
  double success_probability() const;
  void validate() const;
};

/// Draws whether every gate of one transponder succeeds.
bool sample_transponder_success(const GateModel& model, RandomStream& rng);

enum class StageStatus { intact, corrected, failed_multi_loss, failed_gates };

std::string to_string(StageStatus status);
inline bool succeeded(StageStatus s) { return s == StageStatus::intact || s == StageStatus::corrected; }

struct StageResult {
  StageStatus status;
  LossEvent loss;
  /// Present iff the stage succeeded.
  std::optional<PureState> state;
  /// Present iff recovery ran.
  std::optional<losscode::RecoveryOutcome> recovery;
};

/// Segment transmission followed by the station. `encoded` must lie in the
/// code space (DomainError otherwise).
StageResult stage(const PureState& encoded, const SegmentModel& segment, const GateModel& gates,
                  RandomStream& rng);

/// Station behaviour for a given loss pattern; `stage` samples the pattern
/// and delegates here.
StageResult stage_with_event(const PureState& encoded, const LossEvent& event, const GateModel& gates,
                             RandomStream& rng);

}  // namespace lossguard::channel
