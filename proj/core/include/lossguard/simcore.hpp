#pragma once

// Dense state-vector / density-matrix engine for registers of up to eight
// qubits.
//
// Ordering convention: qubit 0 is the most significant bit of the basis
// index, so the ket |q0 q1 ... q(n-1)> is read left to right exactly as it
// is written. For three qubits, |011> is basis index 3 and |100> is index 4.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lossguard/errors.hpp"
#include "lossguard/random.hpp"

namespace lossguard {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Shared tolerance for all exactness checks in the engine.
inline constexpr double kTolerance = 1e-12;
inline constexpr int kMaxQubits = 8;

class PureState;
class DensityMatrix;

namespace detail {
// Construction without validation, for engine internals whose outputs are
// correct by construction.
PureState unchecked_state(int num_qubits, Vector amplitudes);
DensityMatrix unchecked_dm(int num_qubits, Matrix matrix);
}  // namespace detail

/// Normalized pure state on `num_qubits` qubits.
class PureState {
 public:
  /// Validates length 2^n and unit norm (within kTolerance).
  PureState(int num_qubits, Vector amplitudes);

  /// Computational basis state |index>.
  static PureState basis(int num_qubits, std::uint64_t index);
  /// Basis state from a bit string such as "0110" (qubit 0 first).
  static PureState from_bits(std::string_view bits);
  /// Normalizes `amplitudes` first; throws DomainError on a zero vector.
  static PureState normalized(int num_qubits, Vector amplitudes);
  /// Haar-random state (normalized complex Gaussian vector).
  static PureState random(int num_qubits, RandomStream& rng);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex amplitude(std::uint64_t index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }

 private:
  struct Unchecked {};
  PureState(int num_qubits, Vector amplitudes, Unchecked);

  int num_qubits_;
  Vector amplitudes_;

  friend PureState detail::unchecked_state(int, Vector);
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
 public:
  /// Validates every invariant (Hermitian, trace 1, PSD). Uses an
  /// eigendecomposition, so internal operations bypass it.
  DensityMatrix(int num_qubits, Matrix matrix);

  static DensityMatrix from_pure(const PureState& state);
  /// Mixture sum_k w_k |psi_k><psi_k|; weights must sum to one.
  static DensityMatrix mixture(std::span<const std::pair<PureState, double>> ensemble);
  static DensityMatrix maximally_mixed(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }
  Complex operator()(std::uint64_t row, std::uint64_t col) const {
    return matrix_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  double trace() const { return matrix_.trace().real(); }
  double purity() const;
  /// Ascending eigenvalues.
  Eigen::VectorXd eigenvalues() const;
  /// Throws DomainError naming the first violated invariant.
  void check_invariants(double tolerance = kTolerance) const;

  /// The state vector of a rank-one density matrix, with the phase fixed so
  /// its largest-magnitude amplitude is real and positive. Throws
  /// DomainError if the purity is below 1 - tolerance.
  PureState to_pure(double tolerance = 1e-10) const;

 private:
  struct Unchecked {};
  DensityMatrix(int num_qubits, Matrix matrix, Unchecked);

  int num_qubits_;
  Matrix matrix_;

  friend DensityMatrix detail::unchecked_dm(int, Matrix);
};

enum class GateKind { H, X, Z, CNOT, CZ };

std::string to_string(GateKind kind);

/// A gate and the qubits it acts on. Two-qubit kinds list the control first.
class Gate {
 public:
  static Gate h(int q) { return Gate(GateKind::H, {q, -1}); }
  static Gate x(int q) { return Gate(GateKind::X, {q, -1}); }
  static Gate z(int q) { return Gate(GateKind::Z, {q, -1}); }
  static Gate cnot(int control, int target) { return Gate(GateKind::CNOT, {control, target}); }
  static Gate cz(int control, int target) { return Gate(GateKind::CZ, {control, target}); }

  GateKind kind() const { return kind_; }
  int arity() const { return is_two_qubit() ? 2 : 1; }
  bool is_two_qubit() const { return kind_ == GateKind::CNOT || kind_ == GateKind::CZ; }
  std::span<const int> targets() const { return {targets_.data(), static_cast<std::size_t>(arity())}; }
  int target(int i) const { return targets_[static_cast<std::size_t>(i)]; }

  /// 2x2 or 4x4 unitary in the gate's local basis (control is the
  /// more significant local bit).
  Matrix matrix() const;

  /// Throws DomainError unless targets are distinct and below num_qubits.
  void validate_for(int num_qubits) const;

  bool operator==(const Gate&) const = default;

 private:
  Gate(GateKind kind, std::array<int, 2> targets);

  GateKind kind_;
  std::array<int, 2> targets_;
};

using Circuit = std::vector<Gate>;

struct MeasurementRecord {
  std::vector<int> qubits;
  /// Outcome bits packed with qubits[0] as the most significant bit.
  std::uint32_t outcome = 0;
  double probability = 0.0;

  /// Outcome as a bit string, e.g. "01" for qubits {4, 5} reading 0 then 1.
  std::string bits() const;
};

struct ProjectionResult {
  double probability;
  DensityMatrix state;
};

PureState apply_gate(const PureState& state, const Gate& gate);
PureState apply_circuit(PureState state, std::span<const Gate> circuit);
DensityMatrix apply_gate_dm(const DensityMatrix& rho, const Gate& gate);
DensityMatrix apply_circuit_dm(DensityMatrix rho, std::span<const Gate> circuit);

PureState tensor(const PureState& a, const PureState& b);

/// Reduced state after tracing out `qubit`; remaining qubits keep their
/// relative order.
DensityMatrix partial_trace(const DensityMatrix& rho, int qubit);

/// Inserts the single-qubit state `fresh` so that it becomes qubit
/// `position` of the result (0 <= position <= rho.num_qubits()).
DensityMatrix embed(const DensityMatrix& rho, const PureState& fresh, int position);

/// Probability and renormalized post-measurement state of the branch in
/// which `qubits` read `outcome` (qubits[0] is the most significant bit).
/// Throws ImpossibleBranchError if that branch has probability <= kTolerance.
ProjectionResult project(const DensityMatrix& rho, std::span<const int> qubits, std::uint32_t outcome);

/// Born probabilities of every outcome on `qubits`, indexed like `project`.
std::vector<double> outcome_probabilities(const DensityMatrix& rho, std::span<const int> qubits);

/// Samples a computational-basis outcome on `qubits` and collapses.
std::pair<MeasurementRecord, DensityMatrix> measure(const DensityMatrix& rho,
                                                     std::span<const int> qubits,
                                                     RandomStream& rng);

/// |<a|b>|^2.
double fidelity(const PureState& a, const PureState& b);
/// <psi|rho|psi>.
double fidelity(const PureState& psi, const DensityMatrix& rho);
Complex inner_product(const PureState& a, const PureState& b);

}  // namespace lossguard
