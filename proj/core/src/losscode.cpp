#include "lossguard/losscode.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace lossguard::losscode {

namespace {

void check_loss_position(int loss_position) {
  if (loss_position < 0 || loss_position >= kDataQubits) {
    throw DomainError("loss position " + std::to_string(loss_position) + " outside 0..3");
  }
}

const std::array<int, 2> kAncillae{kXAncilla, kZAncilla};

PureState ket(std::string_view a, std::string_view b) {
  const double s = std::numbers::sqrt2 / 2.0;
  Vector v = Vector::Zero(16);
  v(static_cast<Eigen::Index>(std::stoul(std::string(a), nullptr, 2))) = s;
  v(static_cast<Eigen::Index>(std::stoul(std::string(b), nullptr, 2))) = s;
  return PureState(4, std::move(v));
}

PureState zero_qubit() { return PureState::basis(1, 0); }

// Traces out both ancillae of a 6-qubit recovery register.
DensityMatrix drop_ancillae(const DensityMatrix& rho) {
  return partial_trace(partial_trace(rho, kZAncilla), kXAncilla);
}

}  // namespace

const std::array<Codeword, 4>& codewords() {
  static const std::array<Codeword, 4> words{{
      {0b00, ket("0000", "1111")},
      {0b01, ket("0110", "1001")},
      {0b10, ket("1010", "0101")},
      {0b11, ket("1100", "0011")},
  }};
  return words;
}

const Circuit& encoding_circuit() {
  static const Circuit circuit{
      Gate::h(3),       Gate::cnot(3, 2), Gate::cnot(3, 1),
      Gate::cnot(3, 0), Gate::cnot(0, 2), Gate::cnot(1, 2),
  };
  return circuit;
}

const Circuit& recovery_circuit() {
  static const Circuit circuit = [] {
    Circuit c{Gate::h(kXAncilla), Gate::h(kZAncilla)};
    for (int q = 0; q < kDataQubits; ++q) c.push_back(Gate::cnot(kXAncilla, q));
    for (int q = 0; q < kDataQubits; ++q) c.push_back(Gate::cz(kZAncilla, q));
    c.push_back(Gate::h(kXAncilla));
    c.push_back(Gate::h(kZAncilla));
    return c;
  }();
  return circuit;
}

PureState encode(const PureState& logical) {
  if (logical.num_qubits() != kLogicalQubits) throw DomainError("encode expects a two-qubit state");
  return apply_circuit(tensor(logical, PureState::basis(2, 0)), encoding_circuit());
}

PureState decode(const PureState& encoded) {
  if (encoded.num_qubits() != kDataQubits) throw DomainError("decode expects a four-qubit state");
  Circuit inverse(encoding_circuit().rbegin(), encoding_circuit().rend());
  const PureState raw = apply_circuit(encoded, inverse);
  Vector logical(4);
  for (Eigen::Index l = 0; l < 4; ++l) logical(l) = raw.amplitude(static_cast<std::uint64_t>(l) << 2);
  const double weight = logical.squaredNorm();
  if (weight < 1.0 - kCodeTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "state is outside the code space: ancillae return |00> with probability " << weight;
    throw CodeSpaceError(msg.str());
  }
  return PureState::normalized(kLogicalQubits, std::move(logical));
}

double code_space_weight(const PureState& state) {
  if (state.num_qubits() != kDataQubits) throw DomainError("code space check expects a four-qubit state");
  double w = 0.0;
  for (const auto& c : codewords()) w += fidelity(c.state, state);
  return w;
}

bool in_code_space(const PureState& state, double tolerance) {
  return code_space_weight(state) >= 1.0 - tolerance;
}

std::string to_string(PauliWord word) {
  switch (word) {
    case PauliWord::I: return "I";
    case PauliWord::X: return "X";
    case PauliWord::Z: return "Z";
    case PauliWord::XZ: return "XZ";
  }
  return "?";
}

PauliWord pauli_from_string(std::string_view text) {
  for (PauliWord w : kPauliWords) {
    if (to_string(w) == text) return w;
  }
  throw DomainError("unknown Pauli word '" + std::string(text) + "'");
}

Circuit pauli_gates(PauliWord word, int qubit) {
  switch (word) {
    case PauliWord::I: return {};
    case PauliWord::X: return {Gate::x(qubit)};
    case PauliWord::Z: return {Gate::z(qubit)};
    case PauliWord::XZ: return {Gate::z(qubit), Gate::x(qubit)};
  }
  return {};
}

const CorrectionTable& shipped_correction_table(int loss_position) {
  check_loss_position(loss_position);
  // XXXX syndrome (first ancilla) selects Z, ZZZZ syndrome selects X. The
  // pattern is the same for every rail because the syndrome circuit treats
  // all four rails alike.
  static const std::array<CorrectionTable, 4> tables = [] {
    std::array<CorrectionTable, 4> t{};
    for (int k = 0; k < kDataQubits; ++k) {
      t[static_cast<std::size_t>(k)] = {k, {PauliWord::I, PauliWord::X, PauliWord::Z, PauliWord::XZ}};
    }
    return t;
  }();
  return tables[static_cast<std::size_t>(loss_position)];
}

RecoveryStages recovery_stages(const DensityMatrix& damaged, int loss_position) {
  check_loss_position(loss_position);
  if (damaged.num_qubits() != kDataQubits - 1) throw DomainError("damaged state must have three qubits");
  const PureState zero = zero_qubit();
  DensityMatrix substituted = embed(damaged, zero, loss_position);
  DensityMatrix with_ancillae = embed(embed(substituted, zero, kXAncilla), zero, kZAncilla);
  const auto& circuit = recovery_circuit();
  DensityMatrix after_h = apply_circuit_dm(with_ancillae, std::span(circuit).first(2));
  DensityMatrix before = apply_circuit_dm(after_h, std::span(circuit).subspan(2));
  return {std::move(substituted), std::move(with_ancillae), std::move(after_h), std::move(before)};
}

CorrectionTable derive_correction_table(int loss_position) {
  check_loss_position(loss_position);
  std::vector<PureState> probes;
  Vector uniform = Vector::Zero(16);
  for (const auto& c : codewords()) {
    probes.push_back(c.state);
    uniform += c.state.amplitudes();
  }
  probes.push_back(PureState::normalized(kDataQubits, uniform));

  std::vector<DensityMatrix> syndromes;
  for (const auto& probe : probes) {
    const auto damaged = partial_trace(DensityMatrix::from_pure(probe), loss_position);
    syndromes.push_back(recovery_stages(damaged, loss_position).before_measurement);
  }

  CorrectionTable table{loss_position, {}};
  for (std::uint32_t outcome = 0; outcome < 4; ++outcome) {
    std::vector<DensityMatrix> projected;
    for (const auto& rho : syndromes) {
      try {
        projected.push_back(drop_ancillae(project(rho, kAncillae, outcome).state));
      } catch (const ImpossibleBranchError&) {
        throw DerivationError("ancilla outcome " + std::to_string(outcome) + " never occurs at loss position " +
                              std::to_string(loss_position));
      }
    }
    std::vector<PauliWord> working;
    for (PauliWord w : kPauliWords) {
      const auto gates = pauli_gates(w, loss_position);
      bool restores_all = true;
      for (std::size_t i = 0; i < probes.size() && restores_all; ++i) {
        const auto fixed = apply_circuit_dm(projected[i], gates);
        restores_all = fidelity(probes[i], fixed) >= 1.0 - kCodeTolerance;
      }
      if (restores_all) working.push_back(w);
    }
    if (working.size() != 1) {
      throw DerivationError(std::to_string(working.size()) + " Pauli words restore the code for loss position " +
                            std::to_string(loss_position) + ", outcome " + std::to_string(outcome));
    }
    table.entries[outcome] = working.front();
  }
  return table;
}

std::string correction_tables_json(const std::vector<CorrectionTable>& tables) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& t : tables) {
    for (std::uint32_t outcome = 0; outcome < 4; ++outcome) {
      MeasurementRecord m{{kXAncilla, kZAncilla}, outcome, 0.0};
      records.push_back({{"loss_position", t.loss_position},
                         {"outcome_bits", m.bits()},
                         {"pauli_word", to_string(t.entries[outcome])}});
    }
  }
  return records.dump(2);
}

RecoveryOutcome recover(const DensityMatrix& damaged, int loss_position, RandomStream& rng,
                        const RecoverOptions& options) {
  const auto stages = recovery_stages(damaged, loss_position);

  MeasurementRecord record;
  DensityMatrix collapsed = stages.before_measurement;
  if (options.forced_outcome) {
    auto branch = project(stages.before_measurement, kAncillae, *options.forced_outcome);
    record = {{kXAncilla, kZAncilla}, *options.forced_outcome, branch.probability};
    collapsed = std::move(branch.state);
  } else {
    auto [m, post] = measure(stages.before_measurement, kAncillae, rng);
    record = std::move(m);
    collapsed = std::move(post);
  }

  const PauliWord word = shipped_correction_table(loss_position).correction(record.outcome);
  const auto fixed = apply_circuit_dm(drop_ancillae(collapsed), pauli_gates(word, loss_position));

  PureState corrected = [&] {
    try {
      return fixed.to_pure(kCodeTolerance);
    } catch (const DomainError& e) {
      throw RecoveryError(std::string("recovered state is not pure: ") + e.what());
    }
  }();
  if (!in_code_space(corrected)) throw RecoveryError("recovered state is outside the code space");
  if (options.expected && fidelity(*options.expected, corrected) < 1.0 - kCodeTolerance) {
    throw RecoveryError("recovered state does not match the expected codeword");
  }
  return {std::move(record), std::move(corrected), word};
}

RecoveryOutcome recover_purified(const PureState& encoded, int loss_position, RandomStream& rng,
                                 std::optional<std::uint32_t> forced_outcome) {
  check_loss_position(loss_position);
  if (encoded.num_qubits() != kDataQubits) throw DomainError("recover_purified expects a four-qubit state");

  // Qubits 0..3 data (lost rail reset to |0>), 4..5 ancillae, 6 environment.
  constexpr int kTotal = kRecoveryQubits + 1;
  const std::uint64_t lost_bit = std::uint64_t{1} << (kDataQubits - 1 - loss_position);
  Vector v = Vector::Zero(std::int64_t{1} << kTotal);
  for (std::uint64_t i = 0; i < 16; ++i) {
    const std::uint64_t env = (i & lost_bit) ? 1 : 0;
    const std::uint64_t data = i & ~lost_bit;
    v(static_cast<Eigen::Index>((data << 3) | env)) = encoded.amplitude(i);
  }
  const PureState syndrome = apply_circuit(PureState(kTotal, std::move(v)), recovery_circuit());

  std::array<double, 4> probs{};
  for (std::uint64_t i = 0; i < syndrome.dimension(); ++i) probs[(i >> 1) & 3u] += std::norm(syndrome.amplitude(i));

  std::uint32_t outcome = 0;
  if (forced_outcome) {
    outcome = *forced_outcome;
    if (outcome > 3) throw DomainError("ancilla outcome must be in 0..3");
    if (probs[outcome] <= kTolerance) throw ImpossibleBranchError("forced ancilla outcome has probability zero");
  } else {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::uint32_t k = 0; k < 4; ++k) {
      if (probs[k] <= kTolerance) continue;
      outcome = k;
      acc += probs[k];
      if (u < acc) break;
    }
  }

  // Data amplitudes for each environment value within the observed branch.
  Eigen::Matrix<Complex, 16, 2> branch;
  for (std::uint64_t data = 0; data < 16; ++data) {
    for (std::uint64_t env = 0; env < 2; ++env) {
      branch(static_cast<Eigen::Index>(data), static_cast<Eigen::Index>(env)) =
          syndrome.amplitude((data << 3) | (std::uint64_t{outcome} << 1) | env);
    }
  }
  const double prob = probs[outcome];
  const Eigen::Matrix2cd gram = branch.adjoint() * branch / prob;
  const double purity = gram.cwiseAbs2().sum();
  if (purity < 1.0 - kCodeTolerance) throw RecoveryError("recovered state is entangled with the lost photon");

  const Eigen::Index col = branch.col(0).squaredNorm() >= branch.col(1).squaredNorm() ? 0 : 1;
  PureState data_state = PureState::normalized(kDataQubits, branch.col(col));
  const PauliWord word = shipped_correction_table(loss_position).correction(outcome);
  PureState corrected = apply_circuit(std::move(data_state), pauli_gates(word, loss_position));
  return {MeasurementRecord{{kXAncilla, kZAncilla}, outcome, prob}, std::move(corrected), word};
}

}  // namespace lossguard::losscode
