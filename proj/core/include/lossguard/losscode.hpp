#pragma once

// Two-to-four photon-loss code.
//
//   |00> -> (|0000> + |1111>)/sqrt2      |01> -> (|0110> + |1001>)/sqrt2
//   |10> -> (|1010> + |0101>)/sqrt2      |11> -> (|1100> + |0011>)/sqrt2
//
// The code space is the joint +1 eigenspace of XXXX and ZZZZ, so a single
// heralded loss can be undone by replacing the lost photon with |0>,
// measuring both stabilizers with two ancillae, and applying a Pauli to the
// replaced qubit.
//
// Register layout used by the recovery circuit: qubits 0..3 are the data
// rails (top to bottom), qubit 4 is the ancilla that controls the CNOTs
// (measures XXXX) and qubit 5 the ancilla that controls the CZs (measures
// ZZZZ). Ancilla outcomes are written "a4 a5", e.g. "01".

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lossguard/simcore.hpp"

namespace lossguard::losscode {

inline constexpr int kDataQubits = 4;
inline constexpr int kLogicalQubits = 2;
inline constexpr int kXAncilla = 4;
inline constexpr int kZAncilla = 5;
inline constexpr int kRecoveryQubits = 6;
/// Code-space membership tolerance; looser than kTolerance to absorb
/// rounding across the encoder and recovery circuits.
inline constexpr double kCodeTolerance = 1e-10;

struct Codeword {
  std::uint32_t logical_bits;
  PureState state;
};

/// The four codewords, in logical order |00>, |01>, |10>, |11>.
const std::array<Codeword, 4>& codewords();

/// Encoder on qubits (q1, q2, 0, 0): H on qubit 3, CNOTs 3->2, 3->1, 3->0,
/// then CNOTs 0->2 and 1->2.
const Circuit& encoding_circuit();

/// Syndrome circuit on the six-qubit register described above.
const Circuit& recovery_circuit();

/// Encodes a normalized two-qubit state.
PureState encode(const PureState& logical);

/// Runs the encoder backwards and returns the logical state. Throws
/// CodeSpaceError if the ancillae do not come back as |00>.
PureState decode(const PureState& encoded);

/// Squared norm of the projection of a 4-qubit state onto the code space.
double code_space_weight(const PureState& state);
bool in_code_space(const PureState& state, double tolerance = kCodeTolerance);

enum class PauliWord : std::uint8_t { I, X, Z, XZ };

/// "I", "X", "Z" or "XZ". XZ is the operator product: Z acts first.
std::string to_string(PauliWord word);
PauliWord pauli_from_string(std::string_view text);
inline constexpr std::array<PauliWord, 4> kPauliWords{PauliWord::I, PauliWord::X, PauliWord::Z, PauliWord::XZ};

/// Gates implementing `word` on `qubit`, in application order.
Circuit pauli_gates(PauliWord word, int qubit);

struct CorrectionTable {
  int loss_position = 0;
  /// Indexed by the packed ancilla outcome (a4 a5).
  std::array<PauliWord, 4> entries{};

  PauliWord correction(std::uint32_t outcome) const { return entries.at(outcome); }
  bool operator==(const CorrectionTable&) const = default;
};

/// Tables shipped with the library, used by `recover`. The test suite
/// checks them against `derive_correction_table`.
const CorrectionTable& shipped_correction_table(int loss_position);

/// Brute-force search: for each ancilla outcome, the unique Pauli word on
/// the substituted qubit that restores every codeword (and a uniform
/// superposition, which pins relative phases) with fidelity 1.
/// Throws DerivationError if no word or more than one word works.
CorrectionTable derive_correction_table(int loss_position);

/// JSON array of {loss_position, outcome_bits, pauli_word} records.
std::string correction_tables_json(const std::vector<CorrectionTable>& tables);

/// Intermediate states of the recovery circuit before measurement.
struct RecoveryStages {
  DensityMatrix substituted;        // 4 qubits: |0> placed at the loss position
  DensityMatrix with_ancillae;      // 6 qubits: ancillae |00> appended
  DensityMatrix after_hadamards;    // H on both ancillae
  DensityMatrix before_measurement; // CNOTs, CZs and the closing Hadamards
};

RecoveryStages recovery_stages(const DensityMatrix& damaged, int loss_position);

struct RecoveryOutcome {
  MeasurementRecord measurement;
  /// Data qubits after the correction (pure).
  PureState corrected_state;
  PauliWord applied_correction;
};

struct RecoverOptions {
  /// Forces the ancilla outcome instead of sampling it.
  std::optional<std::uint32_t> forced_outcome;
  /// Verification mode: if set, the result must match this encoded state
  /// with fidelity >= 1 - kCodeTolerance or RecoveryError is thrown.
  std::optional<PureState> expected;
};

/// Density-matrix recovery from a heralded loss. `damaged` is the 3-qubit
/// state left after tracing out `loss_position`.
RecoveryOutcome recover(const DensityMatrix& damaged, int loss_position, RandomStream& rng,
                        const RecoverOptions& options = {});

/// Same protocol on a purification: the lost photon is kept as an
/// environment qubit that is never touched again, so the simulation stays
/// a 7-qubit state vector. Equivalent to `recover` on the partial trace of
/// `encoded`, but much cheaper; used by the Monte Carlo layer.
RecoveryOutcome recover_purified(const PureState& encoded, int loss_position, RandomStream& rng,
                                 std::optional<std::uint32_t> forced_outcome = std::nullopt);

}  // namespace lossguard::losscode
