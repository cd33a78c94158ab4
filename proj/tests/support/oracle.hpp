#pragma once

// Test-only reference implementations. Circuits are turned into full
// 2^n x 2^n matrices by Kronecker products of literal gate matrices, so
// nothing here shares code with the bit-twiddling kernels under test.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lossguard/random.hpp"
#include "lossguard/simcore.hpp"

namespace lossguard::oracle {

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Matrix identity(int num_qubits) {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  return Matrix::Identity(d, d);
}

inline Matrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix m(2, 2);
  m << s, s, s, -s;
  return m;
}
inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline Matrix projector(int bit) {
  Matrix m = Matrix::Zero(2, 2);
  m(bit, bit) = 1.0;
  return m;
}

// I (x) ... (x) u (x) ... (x) I with u on wire q (wire 0 leftmost).
inline Matrix on_wire(const Matrix& u, int q, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int w = 0; w < n; ++w) out = kron(out, w == q ? u : Matrix::Identity(2, 2));
  return out;
}

inline Matrix controlled(const Matrix& u, int control, int target, int n) {
  Matrix off = Matrix::Identity(1, 1);
  Matrix on = Matrix::Identity(1, 1);
  for (int w = 0; w < n; ++w) {
    off = kron(off, w == control ? projector(0) : Matrix::Identity(2, 2));
    on = kron(on, w == control ? projector(1) : (w == target ? u : Matrix::Identity(2, 2)));
  }
  return off + on;
}

inline Matrix gate_operator(const Gate& g, int n) {
  switch (g.kind()) {
    case GateKind::H: return on_wire(hadamard(), g.target(0), n);
    case GateKind::X: return on_wire(pauli_x(), g.target(0), n);
    case GateKind::Z: return on_wire(pauli_z(), g.target(0), n);
    case GateKind::CNOT: return controlled(pauli_x(), g.target(0), g.target(1), n);
    case GateKind::CZ: return controlled(pauli_z(), g.target(0), g.target(1), n);
  }
  return {};
}

inline Matrix circuit_operator(const std::vector<Gate>& circuit, int n) {
  Matrix u = identity(n);
  for (const auto& g : circuit) u = gate_operator(g, n) * u;
  return u;
}

// Sum of (coefficient, bit string) terms, not normalized.
inline Vector kets(std::initializer_list<std::pair<Complex, std::string_view>> terms) {
  const auto n = static_cast<int>(terms.begin()->second.size());
  Vector v = Vector::Zero(Eigen::Index{1} << n);
  for (const auto& [c, bits] : terms) {
    v(static_cast<Eigen::Index>(std::stoul(std::string(bits), nullptr, 2))) += c;
  }
  return v;
}

inline Matrix outer(const Vector& v) { return v * v.adjoint(); }

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Random mixed state: a random-weight mixture of a few Haar states.
inline DensityMatrix random_density(int n, RandomStream& rng, int rank = 3) {
  std::vector<std::pair<PureState, double>> ens;
  double total = 0.0;
  std::vector<double> w;
  for (int k = 0; k < rank; ++k) {
    w.push_back(rng.uniform() + 0.05);
    total += w.back();
  }
  for (int k = 0; k < rank; ++k) ens.emplace_back(PureState::random(n, rng), w[static_cast<std::size_t>(k)] / total);
  return DensityMatrix::mixture(ens);
}

inline Gate random_gate(int n, RandomStream& rng) {
  const auto pick = [&](int hi) { return static_cast<int>(rng.uniform() * hi); };
  const int kind = pick(5);
  const int a = pick(n);
  int b = pick(n - 1);
  if (b >= a) ++b;
  switch (kind) {
    case 0: return Gate::h(a);
    case 1: return Gate::x(a);
    case 2: return Gate::z(a);
    case 3: return Gate::cnot(a, b);
    default: return Gate::cz(a, b);
  }
}

}  // namespace lossguard::oracle
