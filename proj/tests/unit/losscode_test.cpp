#include "lossguard/losscode.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <json.hpp>

#include "oracle.hpp"

using namespace lossguard;
using namespace lossguard::losscode;

namespace {

constexpr double kTol = 1e-12;
constexpr double kRecoverTol = 1e-10;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void expect_vector_near(const Vector& got, const Vector& want, double tol = kTol) {
  ASSERT_EQ(got.size(), want.size());
  for (Eigen::Index i = 0; i < got.size(); ++i) EXPECT_NEAR(std::abs(got(i) - want(i)), 0.0, tol) << "i=" << i;
}

PureState codeword_01() { return PureState(4, oracle::kets({{kInvSqrt2, "0110"}, {kInvSqrt2, "1001"}})); }

DensityMatrix rho1() { return partial_trace(DensityMatrix::from_pure(codeword_01()), 3); }

}  // namespace

// ---------- codewords ----------

TEST(Codewords, GramMatrixIsIdentity) {
  const auto& words = codewords();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(std::abs(inner_product(words[i].state, words[j].state)), i == j ? 1.0 : 0.0, kTol);
    }
  }
}

TEST(Codewords, EqualSuperpositionOfTwoKets) {
  for (const auto& c : codewords()) {
    int support = 0;
    for (std::uint64_t k = 0; k < 16; ++k) {
      const double mag = std::abs(c.state.amplitude(k));
      if (mag > kTol) {
        ++support;
        EXPECT_NEAR(mag, kInvSqrt2, kTol);
      }
    }
    EXPECT_EQ(support, 2);
  }
}

// ---------- encode ----------

TEST(Encode, BasisStatesGiveCodewords) {
  expect_vector_near(encode(PureState::from_bits("01")).amplitudes(),
                     oracle::kets({{kInvSqrt2, "0110"}, {kInvSqrt2, "1001"}}));
  expect_vector_near(encode(PureState::from_bits("11")).amplitudes(),
                     oracle::kets({{kInvSqrt2, "1100"}, {kInvSqrt2, "0011"}}));
  for (const auto& c : codewords()) {
    expect_vector_near(encode(PureState::basis(2, c.logical_bits)).amplitudes(), c.state.amplitudes());
  }
}

TEST(Encode, BellInputMatchesCircuitMatrix) {
  const Vector bell = oracle::kets({{kInvSqrt2, "00"}, {kInvSqrt2, "11"}});
  // Oracle: full 16x16 encoder matrix acting on bell (x) |00>.
  const Vector oracle_out =
      oracle::circuit_operator(encoding_circuit(), 4) * oracle::kron(bell, oracle::kets({{1.0, "00"}}));
  const Vector frozen = oracle::kets({{0.5, "0000"}, {0.5, "1111"}, {0.5, "1100"}, {0.5, "0011"}});
  expect_vector_near(oracle_out, frozen);
  expect_vector_near(encode(PureState(2, bell)).amplitudes(), frozen);
}

TEST(Encode, IsLinearExtensionOfCodewords) {
  RandomStream rng(41);
  for (int t = 0; t < 50; ++t) {
    const auto psi = PureState::random(2, rng);
    Vector want = Vector::Zero(16);
    for (const auto& c : codewords()) want += psi.amplitude(c.logical_bits) * c.state.amplitudes();
    expect_vector_near(encode(psi).amplitudes(), want);
  }
}

TEST(Encode, IsAnIsometry) {
  RandomStream rng(42);
  for (int t = 0; t < 100; ++t) {
    const auto a = PureState::random(2, rng);
    const auto b = PureState::random(2, rng);
    EXPECT_NEAR(std::abs(inner_product(encode(a), encode(b)) - inner_product(a, b)), 0.0, kTol);
  }
}

TEST(Encode, RejectsWrongSize) { EXPECT_THROW(encode(PureState::basis(3, 0)), DomainError); }

// ---------- decode ----------

TEST(Decode, CodewordsInvert) {
  expect_vector_near(decode(codeword_01()).amplitudes(), PureState::from_bits("01").amplitudes());
  const auto c00 = PureState(4, oracle::kets({{kInvSqrt2, "0000"}, {kInvSqrt2, "1111"}}));
  expect_vector_near(decode(c00).amplitudes(), PureState::from_bits("00").amplitudes());
}

TEST(Decode, RoundTrip) {
  RandomStream rng(43);
  for (int t = 0; t < 100; ++t) {
    const auto psi = PureState::random(2, rng);
    EXPECT_NEAR(fidelity(decode(encode(psi)), psi), 1.0, kTol);
  }
}

TEST(Decode, RejectsStatesOutsideCodeSpace) {
  EXPECT_THROW(decode(PureState::from_bits("0001")), CodeSpaceError);
  const auto mixed_in = PureState(4, oracle::kets({{kInvSqrt2, "0000"}, {kInvSqrt2, "0001"}}));
  EXPECT_THROW(decode(mixed_in), CodeSpaceError);
  EXPECT_FALSE(in_code_space(PureState::from_bits("0001")));
  EXPECT_TRUE(in_code_space(codeword_01()));
}

// ---------- recovery walkthrough ----------

TEST(Recover, LastRailOutcomeZeroZero) {
  RandomStream rng(1);
  RecoverOptions opts;
  opts.forced_outcome = 0b00;
  const auto out = recover(rho1(), 3, rng, opts);
  EXPECT_EQ(out.applied_correction, PauliWord::I);
  EXPECT_EQ(out.measurement.bits(), "00");
  EXPECT_NEAR(out.measurement.probability, 0.25, kTol);
  EXPECT_NEAR(fidelity(out.corrected_state, codeword_01()), 1.0, kTol);
}

TEST(Recover, LastRailOutcomeOneOne) {
  const auto stages = recovery_stages(rho1(), 3);
  const std::vector<int> anc{kXAncilla, kZAncilla};
  const auto branch = project(stages.before_measurement, anc, 0b11);
  const auto projected = partial_trace(partial_trace(branch.state, 5), 4).to_pure();
  const auto want = PureState(4, oracle::kets({{kInvSqrt2, "1000"}, {-kInvSqrt2, "0111"}}));
  EXPECT_NEAR(fidelity(projected, want), 1.0, kTol);

  RandomStream rng(1);
  RecoverOptions opts;
  opts.forced_outcome = 0b11;
  const auto out = recover(rho1(), 3, rng, opts);
  EXPECT_EQ(out.applied_correction, PauliWord::XZ);
  EXPECT_NEAR(fidelity(out.corrected_state, codeword_01()), 1.0, kTol);
}

TEST(Recover, RandomInputLossOnRailOneEveryOutcome) {
  RandomStream rng(44);
  for (int t = 0; t < 20; ++t) {
    const auto encoded = encode(PureState::random(2, rng));
    const auto damaged = partial_trace(DensityMatrix::from_pure(encoded), 1);
    for (std::uint32_t o = 0; o < 4; ++o) {
      RecoverOptions opts;
      opts.forced_outcome = o;
      opts.expected = encoded;
      const auto out = recover(damaged, 1, rng, opts);
      EXPECT_NEAR(fidelity(out.corrected_state, encoded), 1.0, kRecoverTol);
    }
  }
}

TEST(Recover, SampledOutcomeAlsoRestores) {
  RandomStream rng(45);
  std::array<int, 4> seen{};
  for (int t = 0; t < 200; ++t) {
    const auto encoded = encode(PureState::random(2, rng));
    const int pos = t % 4;
    const auto out = recover(partial_trace(DensityMatrix::from_pure(encoded), pos), pos, rng);
    ++seen[out.measurement.outcome];
    EXPECT_NEAR(fidelity(out.corrected_state, encoded), 1.0, kRecoverTol);
  }
  for (int count : seen) EXPECT_GT(count, 20);
}

TEST(Recover, VerificationModeFlagsWrongReference) {
  RandomStream rng(2);
  RecoverOptions opts;
  opts.forced_outcome = 0b00;
  opts.expected = encode(PureState::from_bits("10"));
  EXPECT_THROW(recover(rho1(), 3, rng, opts), RecoveryError);
}

TEST(Recover, RejectsDamageThatDidNotComeFromTheCode) {
  RandomStream rng(3);
  // A maximally mixed remainder stays mixed after the syndrome projection.
  const auto damaged = DensityMatrix::maximally_mixed(3);
  RecoverOptions opts;
  opts.forced_outcome = 0b00;
  EXPECT_THROW(recover(damaged, 3, rng, opts), RecoveryError);
}

TEST(Recover, RejectsBadArguments) {
  RandomStream rng(4);
  EXPECT_THROW(recover(rho1(), 4, rng), DomainError);
  EXPECT_THROW(recover(DensityMatrix::maximally_mixed(2), 0, rng), DomainError);
}

// ---------- correction tables ----------

TEST(CorrectionTable, LastRailTableIsIXZXZ) {
  const auto t = derive_correction_table(3);
  EXPECT_EQ(t.correction(0b00), PauliWord::I);
  EXPECT_EQ(t.correction(0b01), PauliWord::X);
  EXPECT_EQ(t.correction(0b10), PauliWord::Z);
  EXPECT_EQ(t.correction(0b11), PauliWord::XZ);
}

TEST(CorrectionTable, DerivedTablesMatchShippedTables) {
  for (int pos = 0; pos < 4; ++pos) {
    const auto derived = derive_correction_table(pos);
    EXPECT_EQ(derived.loss_position, pos);
    EXPECT_EQ(derived, shipped_correction_table(pos)) << "position " << pos;
  }
}

TEST(CorrectionTable, EntriesAreSelfInverseUpToPhase) {
  RandomStream rng(46);
  for (int pos = 0; pos < 4; ++pos) {
    const auto t = derive_correction_table(pos);
    for (PauliWord w : t.entries) {
      const auto psi = PureState::random(4, rng);
      auto gates = pauli_gates(w, pos);
      const auto twice = apply_circuit(apply_circuit(psi, gates), gates);
      EXPECT_NEAR(fidelity(twice, psi), 1.0, kTol);
    }
  }
}

TEST(CorrectionTable, RejectsBadPosition) {
  EXPECT_THROW(derive_correction_table(-1), DomainError);
  EXPECT_THROW(shipped_correction_table(4), DomainError);
}

TEST(CorrectionTable, JsonExport) {
  std::vector<CorrectionTable> tables;
  for (int pos = 0; pos < 4; ++pos) tables.push_back(derive_correction_table(pos));
  const auto doc = nlohmann::json::parse(correction_tables_json(tables));
  ASSERT_EQ(doc.size(), 16u);
  EXPECT_EQ(doc[13]["loss_position"], 3);
  EXPECT_EQ(doc[13]["outcome_bits"], "01");
  EXPECT_EQ(doc[13]["pauli_word"], "X");
  for (const auto& rec : doc) EXPECT_NO_THROW(pauli_from_string(rec["pauli_word"].get<std::string>()));
}

TEST(PauliWords, StringRoundTrip) {
  for (PauliWord w : kPauliWords) EXPECT_EQ(pauli_from_string(to_string(w)), w);
  EXPECT_THROW(pauli_from_string("Y"), DomainError);
}

// ---------- properties ----------

TEST(Properties, RoundTripAllPositionsAllOutcomes) {
  RandomStream rng(47);
  for (int t = 0; t < 100; ++t) {
    const auto encoded = encode(PureState::random(2, rng));
    const auto rho = DensityMatrix::from_pure(encoded);
    for (int pos = 0; pos < 4; ++pos) {
      const auto damaged = partial_trace(rho, pos);
      for (std::uint32_t o = 0; o < 4; ++o) {
        RecoverOptions opts;
        opts.forced_outcome = o;
        const auto out = recover(damaged, pos, rng, opts);
        ASSERT_NEAR(fidelity(out.corrected_state, encoded), 1.0, kRecoverTol) << "t=" << t << " pos=" << pos;
      }
    }
  }
}

TEST(Properties, OutcomesUniformAndIndependentOfInput) {
  RandomStream rng(48);
  const std::vector<int> anc{kXAncilla, kZAncilla};
  for (int t = 0; t < 50; ++t) {
    const auto encoded = encode(PureState::random(2, rng));
    for (int pos = 0; pos < 4; ++pos) {
      const auto stages = recovery_stages(partial_trace(DensityMatrix::from_pure(encoded), pos), pos);
      for (double p : outcome_probabilities(stages.before_measurement, anc)) EXPECT_NEAR(p, 0.25, kTol);
    }
  }
}

TEST(Properties, PostMeasurementDataStateIsPure) {
  RandomStream rng(49);
  const std::vector<int> anc{kXAncilla, kZAncilla};
  for (int t = 0; t < 10; ++t) {
    const auto encoded = encode(PureState::random(2, rng));
    for (int pos = 0; pos < 4; ++pos) {
      const auto stages = recovery_stages(partial_trace(DensityMatrix::from_pure(encoded), pos), pos);
      for (std::uint32_t o = 0; o < 4; ++o) {
        const auto data = partial_trace(partial_trace(project(stages.before_measurement, anc, o).state, 5), 4);
        const auto ev = data.eigenvalues();
        EXPECT_NEAR(ev(ev.size() - 1), 1.0, kRecoverTol);
        EXPECT_NEAR(ev.head(ev.size() - 1).cwiseAbs().sum(), 0.0, kRecoverTol);
      }
    }
  }
}

TEST(Properties, PurifiedRecoveryAgreesWithDensityMatrixRecovery) {
  RandomStream rng(50);
  for (int t = 0; t < 50; ++t) {
    const auto encoded = encode(PureState::random(2, rng));
    for (int pos = 0; pos < 4; ++pos) {
      const auto damaged = partial_trace(DensityMatrix::from_pure(encoded), pos);
      for (std::uint32_t o = 0; o < 4; ++o) {
        RecoverOptions opts;
        opts.forced_outcome = o;
        const auto dm = recover(damaged, pos, rng, opts);
        const auto pure = recover_purified(encoded, pos, rng, o);
        EXPECT_EQ(dm.applied_correction, pure.applied_correction);
        EXPECT_NEAR(dm.measurement.probability, pure.measurement.probability, kTol);
        EXPECT_NEAR(fidelity(dm.corrected_state, pure.corrected_state), 1.0, kRecoverTol);
      }
    }
  }
}
