#include "lossguard/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lossguard {

namespace {

std::uint64_t dim_of(int num_qubits) { return std::uint64_t{1} << num_qubits; }

void check_qubit_count(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    std::ostringstream msg;
    msg << "qubit count " << num_qubits << " outside [1, " << kMaxQubits << "]";
    throw DomainError(msg.str());
  }
}

// Bit mask of qubit q in an n-qubit basis index (qubit 0 is the MSB).
std::uint64_t bit_of(int num_qubits, int q) { return std::uint64_t{1} << (num_qubits - 1 - q); }

// Inserts `bit` at bit position `pos` (counted from the LSB) of `value`.
std::uint64_t insert_bit(std::uint64_t value, int pos, std::uint64_t bit) {
  const std::uint64_t low = value & ((std::uint64_t{1} << pos) - 1);
  const std::uint64_t high = (value >> pos) << (pos + 1);
  return high | (bit << pos) | low;
}

// Applies the gate's unitary to the row space of `m`: m <- U m. Works for a
// state vector (one column) and for the columns of a density matrix alike.
template <typename Derived>
void apply_rows(Eigen::MatrixBase<Derived>& m, const Gate& gate, int num_qubits) {
  const auto dim = static_cast<std::uint64_t>(m.rows());
  const auto row = [&m](std::uint64_t i) { return m.row(static_cast<Eigen::Index>(i)); };
  switch (gate.kind()) {
    case GateKind::H: {
      const std::uint64_t b = bit_of(num_qubits, gate.target(0));
      const double s = std::numbers::sqrt2 / 2.0;
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & b) continue;
        const auto r0 = row(i).eval();
        const auto r1 = row(i | b).eval();
        row(i) = s * (r0 + r1);
        row(i | b) = s * (r0 - r1);
      }
      break;
    }
    case GateKind::X: {
      const std::uint64_t b = bit_of(num_qubits, gate.target(0));
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (!(i & b)) row(i).swap(row(i | b));
      }
      break;
    }
    case GateKind::Z: {
      const std::uint64_t b = bit_of(num_qubits, gate.target(0));
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & b) row(i) *= -1.0;
      }
      break;
    }
    case GateKind::CNOT: {
      const std::uint64_t c = bit_of(num_qubits, gate.target(0));
      const std::uint64_t t = bit_of(num_qubits, gate.target(1));
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & c) && !(i & t)) row(i).swap(row(i | t));
      }
      break;
    }
    case GateKind::CZ: {
      const std::uint64_t c = bit_of(num_qubits, gate.target(0));
      const std::uint64_t t = bit_of(num_qubits, gate.target(1));
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & c) && (i & t)) row(i) *= -1.0;
      }
      break;
    }
  }
}

// Packs the values of `qubits` in basis index `index`, qubits[0] first.
std::uint32_t extract_outcome(std::uint64_t index, int num_qubits, std::span<const int> qubits) {
  std::uint32_t out = 0;
  for (int q : qubits) {
    out = (out << 1) | ((index & bit_of(num_qubits, q)) ? 1u : 0u);
  }
  return out;
}

void check_measured_qubits(int num_qubits, std::span<const int> qubits) {
  if (qubits.empty() || qubits.size() > 31) throw DomainError("measurement needs 1..31 qubits");
  std::uint64_t seen = 0;
  for (int q : qubits) {
    if (q < 0 || q >= num_qubits) {
      throw DomainError("measured qubit " + std::to_string(q) + " out of range for " +
                        std::to_string(num_qubits) + "-qubit state");
    }
    const std::uint64_t b = bit_of(num_qubits, q);
    if (seen & b) throw DomainError("measured qubits must be distinct");
    seen |= b;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(int num_qubits, Vector amplitudes, Unchecked)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {}

PureState::PureState(int num_qubits, Vector amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
  check_qubit_count(num_qubits_);
  if (static_cast<std::uint64_t>(amplitudes_.size()) != dim_of(num_qubits_)) {
    throw DomainError("amplitude vector length must be 2^num_qubits");
  }
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "state is not normalized (squared norm " << norm2 << ")";
    throw DomainError(msg.str());
  }
}

PureState PureState::basis(int num_qubits, std::uint64_t index) {
  check_qubit_count(num_qubits);
  if (index >= dim_of(num_qubits)) throw DomainError("basis index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim_of(num_qubits)));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(num_qubits, std::move(v), Unchecked{});
}

PureState PureState::from_bits(std::string_view bits) {
  std::uint64_t index = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw DomainError("bit string may contain only '0' and '1'");
    index = (index << 1) | static_cast<std::uint64_t>(ch - '0');
  }
  return basis(static_cast<int>(bits.size()), index);
}

PureState PureState::normalized(int num_qubits, Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("cannot normalize a zero vector");
  amplitudes /= norm;
  return PureState(num_qubits, std::move(amplitudes));
}

PureState PureState::random(int num_qubits, RandomStream& rng) {
  check_qubit_count(num_qubits);
  Vector v(static_cast<Eigen::Index>(dim_of(num_qubits)));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v(i) = Complex(re, im);
  }
  return normalized(num_qubits, std::move(v));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(int num_qubits, Matrix matrix, Unchecked)
    : num_qubits_(num_qubits), matrix_(std::move(matrix)) {}

DensityMatrix::DensityMatrix(int num_qubits, Matrix matrix)
    : num_qubits_(num_qubits), matrix_(std::move(matrix)) {
  check_qubit_count(num_qubits_);
  const auto d = static_cast<Eigen::Index>(dim_of(num_qubits_));
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw DomainError("density matrix must be 2^num_qubits square");
  }
  check_invariants();
}

DensityMatrix DensityMatrix::from_pure(const PureState& state) {
  Matrix m = state.amplitudes() * state.amplitudes().adjoint();
  return DensityMatrix(state.num_qubits(), std::move(m), Unchecked{});
}

DensityMatrix DensityMatrix::mixture(std::span<const std::pair<PureState, double>> ensemble) {
  if (ensemble.empty()) throw DomainError("empty ensemble");
  const int n = ensemble.front().first.num_qubits();
  const auto d = static_cast<Eigen::Index>(dim_of(n));
  Matrix m = Matrix::Zero(d, d);
  double total = 0.0;
  for (const auto& [state, weight] : ensemble) {
    if (state.num_qubits() != n) throw DomainError("ensemble members differ in qubit count");
    if (weight < 0.0) throw DomainError("negative ensemble weight");
    m += weight * (state.amplitudes() * state.amplitudes().adjoint());
    total += weight;
  }
  if (std::abs(total - 1.0) > kTolerance) throw DomainError("ensemble weights must sum to one");
  return DensityMatrix(n, std::move(m), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  check_qubit_count(num_qubits);
  const auto d = static_cast<Eigen::Index>(dim_of(num_qubits));
  Matrix m = Matrix::Identity(d, d) / static_cast<double>(d);
  return DensityMatrix(num_qubits, std::move(m), Unchecked{});
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return matrix_.squaredNorm();
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

void DensityMatrix::check_invariants(double tolerance) const {
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tolerance) throw DomainError("density matrix is not Hermitian");
  const Complex tr = matrix_.trace();
  if (std::abs(tr.real() - 1.0) > tolerance || std::abs(tr.imag()) > tolerance) {
    throw DomainError("density matrix trace is not one");
  }
  if (eigenvalues().minCoeff() < -1e-10) throw DomainError("density matrix has a negative eigenvalue");
}

PureState DensityMatrix::to_pure(double tolerance) const {
  const double p = purity();
  if (p < 1.0 - tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "density matrix is mixed (purity " << p << ")";
    throw DomainError(msg.str());
  }
  // For rho = |psi><psi|, column k is psi * conj(psi_k); pick the column
  // with the largest diagonal entry and divide out sqrt(rho_kk).
  Eigen::Index k = 0;
  matrix_.diagonal().real().maxCoeff(&k);
  const double scale = std::sqrt(matrix_(k, k).real());
  Vector v = matrix_.col(k) / scale;
  return PureState::normalized(num_qubits_, std::move(v));
}

namespace detail {
PureState unchecked_state(int num_qubits, Vector amplitudes) {
  return PureState(num_qubits, std::move(amplitudes), PureState::Unchecked{});
}
DensityMatrix unchecked_dm(int num_qubits, Matrix matrix) {
  return DensityMatrix(num_qubits, std::move(matrix), DensityMatrix::Unchecked{});
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Gate

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
  }
  return "?";
}

Gate::Gate(GateKind kind, std::array<int, 2> targets) : kind_(kind), targets_(targets) {}

Matrix Gate::matrix() const {
  const double s = std::numbers::sqrt2 / 2.0;
  switch (kind_) {
    case GateKind::H: return (Matrix(2, 2) << s, s, s, -s).finished();
    case GateKind::X: return (Matrix(2, 2) << 0, 1, 1, 0).finished();
    case GateKind::Z: return (Matrix(2, 2) << 1, 0, 0, -1).finished();
    case GateKind::CNOT: {
      Matrix m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
      return m;
    }
    case GateKind::CZ: {
      Matrix m = Matrix::Identity(4, 4);
      m(3, 3) = -1.0;
      return m;
    }
  }
  return {};
}

void Gate::validate_for(int num_qubits) const {
  for (int t : targets()) {
    if (t < 0 || t >= num_qubits) {
      throw DomainError(to_string(kind_) + " target " + std::to_string(t) + " out of range for " +
                        std::to_string(num_qubits) + "-qubit state");
    }
  }
  if (is_two_qubit() && targets_[0] == targets_[1]) {
    throw DomainError(to_string(kind_) + " control and target must differ");
  }
}

std::string MeasurementRecord::bits() const {
  std::string s;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    s.push_back(((outcome >> (qubits.size() - 1 - i)) & 1u) ? '1' : '0');
  }
  return s;
}

// ---------------------------------------------------------------------------
// Operations

PureState apply_gate(const PureState& state, const Gate& gate) {
  gate.validate_for(state.num_qubits());
  Vector v = state.amplitudes();
  apply_rows(v, gate, state.num_qubits());
  return detail::unchecked_state(state.num_qubits(), std::move(v));
}

PureState apply_circuit(PureState state, std::span<const Gate> circuit) {
  for (const Gate& g : circuit) g.validate_for(state.num_qubits());
  Vector v = state.amplitudes();
  for (const Gate& g : circuit) apply_rows(v, g, state.num_qubits());
  return detail::unchecked_state(state.num_qubits(), std::move(v));
}

DensityMatrix apply_gate_dm(const DensityMatrix& rho, const Gate& gate) {
  return apply_circuit_dm(rho, std::span<const Gate>(&gate, 1));
}

DensityMatrix apply_circuit_dm(DensityMatrix rho, std::span<const Gate> circuit) {
  const int n = rho.num_qubits();
  for (const Gate& g : circuit) g.validate_for(n);
  Matrix m = rho.matrix();
  for (const Gate& g : circuit) {
    // U rho, then U (U rho)^dagger = U rho U^dagger since rho is Hermitian.
    apply_rows(m, g, n);
    m.adjointInPlace();
    apply_rows(m, g, n);
  }
  return detail::unchecked_dm(n, std::move(m));
}

PureState tensor(const PureState& a, const PureState& b) {
  const int n = a.num_qubits() + b.num_qubits();
  check_qubit_count(n);
  Vector v(static_cast<Eigen::Index>(a.dimension() * b.dimension()));
  const auto db = static_cast<Eigen::Index>(b.dimension());
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
    v.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
  }
  return detail::unchecked_state(n, std::move(v));
}

DensityMatrix partial_trace(const DensityMatrix& rho, int qubit) {
  const int n = rho.num_qubits();
  if (n < 2) throw DomainError("partial trace needs at least two qubits");
  if (qubit < 0 || qubit >= n) {
    throw DomainError("partial trace qubit " + std::to_string(qubit) + " out of range");
  }
  const int pos = n - 1 - qubit;
  const std::uint64_t d = dim_of(n - 1);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::uint64_t a = 0; a < d; ++a) {
    for (std::uint64_t b = 0; b < d; ++b) {
      Complex acc = 0.0;
      for (std::uint64_t s = 0; s < 2; ++s) acc += rho(insert_bit(a, pos, s), insert_bit(b, pos, s));
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
    }
  }
  return detail::unchecked_dm(n - 1, std::move(out));
}

DensityMatrix embed(const DensityMatrix& rho, const PureState& fresh, int position) {
  if (fresh.num_qubits() != 1) throw DomainError("embedded state must be a single qubit");
  const int n = rho.num_qubits();
  if (position < 0 || position > n) {
    throw DomainError("embed position " + std::to_string(position) + " out of range");
  }
  check_qubit_count(n + 1);
  const int pos = n - position;
  const std::uint64_t d = dim_of(n);
  const auto big = static_cast<Eigen::Index>(dim_of(n + 1));
  Matrix out = Matrix::Zero(big, big);
  for (std::uint64_t a = 0; a < d; ++a) {
    for (std::uint64_t b = 0; b < d; ++b) {
      const Complex r = rho(a, b);
      for (std::uint64_t s = 0; s < 2; ++s) {
        for (std::uint64_t t = 0; t < 2; ++t) {
          out(static_cast<Eigen::Index>(insert_bit(a, pos, s)), static_cast<Eigen::Index>(insert_bit(b, pos, t))) =
              r * fresh.amplitude(s) * std::conj(fresh.amplitude(t));
        }
      }
    }
  }
  return detail::unchecked_dm(n + 1, std::move(out));
}

std::vector<double> outcome_probabilities(const DensityMatrix& rho, std::span<const int> qubits) {
  const int n = rho.num_qubits();
  check_measured_qubits(n, qubits);
  std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
  for (std::uint64_t i = 0; i < rho.dimension(); ++i) {
    probs[extract_outcome(i, n, qubits)] += rho(i, i).real();
  }
  return probs;
}

ProjectionResult project(const DensityMatrix& rho, std::span<const int> qubits, std::uint32_t outcome) {
  const int n = rho.num_qubits();
  check_measured_qubits(n, qubits);
  if (outcome >= (1u << qubits.size())) throw DomainError("outcome has more bits than measured qubits");
  const auto d = static_cast<Eigen::Index>(rho.dimension());
  Eigen::ArrayXd keep(d);
  double prob = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const bool match = extract_outcome(static_cast<std::uint64_t>(i), n, qubits) == outcome;
    keep(i) = match ? 1.0 : 0.0;
    if (match) prob += rho.matrix()(i, i).real();
  }
  if (prob <= kTolerance) {
    throw ImpossibleBranchError("measurement branch has probability " + std::to_string(prob));
  }
  Matrix out = keep.matrix().asDiagonal() * rho.matrix() * keep.matrix().asDiagonal();
  out /= prob;
  return {prob, detail::unchecked_dm(n, std::move(out))};
}

std::pair<MeasurementRecord, DensityMatrix> measure(const DensityMatrix& rho, std::span<const int> qubits,
                                                     RandomStream& rng) {
  const auto probs = outcome_probabilities(rho, qubits);
  const double u = rng.uniform();
  double acc = 0.0;
  std::uint32_t chosen = 0;
  // Fall back to the last nonzero branch if rounding leaves u above the sum.
  for (std::uint32_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= kTolerance) continue;
    chosen = k;
    acc += probs[k];
    if (u < acc) break;
  }
  auto branch = project(rho, qubits, chosen);
  MeasurementRecord record{std::vector<int>(qubits.begin(), qubits.end()), chosen, branch.probability};
  return {std::move(record), std::move(branch.state)};
}

Complex inner_product(const PureState& a, const PureState& b) {
  if (a.num_qubits() != b.num_qubits()) throw DomainError("inner product of states with different qubit counts");
  return a.amplitudes().dot(b.amplitudes());
}

double fidelity(const PureState& a, const PureState& b) {
  return std::clamp(std::norm(inner_product(a, b)), 0.0, 1.0);
}

double fidelity(const PureState& psi, const DensityMatrix& rho) {
  if (psi.num_qubits() != rho.num_qubits()) throw DomainError("fidelity of states with different qubit counts");
  const Complex v = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return std::clamp(v.real(), 0.0, 1.0);
}

}  // namespace lossguard
