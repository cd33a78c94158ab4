#include "lossguard_cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "lossguard/analytics.hpp"
#include "lossguard/chainsim.hpp"
#include "lossguard/losscode.hpp"
#include "lossguard_cli/config.hpp"
#include "lossguard_cli/grid.hpp"

namespace lossguard::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kFidelityTolerance = 1e-10;
constexpr double kUniformityTolerance = 1e-12;
constexpr double kCodewordTolerance = 1e-12;
constexpr double kReferencePt = 0.75;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw UsageError("failed writing '" + path + "'");
}

// JSON has no infinity or NaN; both become null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json amplitudes_json(const PureState& s) {
  json out = json::array();
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
    out.push_back({s.amplitudes()(i).real(), s.amplitudes()(i).imag()});
  }
  return out;
}

std::uint32_t parse_outcome_bits(const std::string& text) {
  if (text.size() != 2 || text.find_first_not_of("01") != std::string::npos) {
    throw UsageError("--outcome must be two bits such as 01");
  }
  return static_cast<std::uint32_t>(std::stoul(text, nullptr, 2));
}

// ---------- verify ----------

struct VerifyOptions {
  int qubit_loss = -1;
  std::string outcome;
  std::string expect;
  bool list_tables = false;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string format = "text";
  std::string out;
};

struct PropertyResult {
  std::string name;
  std::int64_t checks = 0;
  bool passed = true;
  json counterexample = nullptr;

  void fail(json example) {
    if (passed) counterexample = std::move(example);
    passed = false;
  }
};

PropertyResult check_codewords() {
  PropertyResult res{"codewords"};
  for (const auto& c : losscode::codewords()) {
    ++res.checks;
    const auto encoded = losscode::encode(PureState::basis(losscode::kLogicalQubits, c.logical_bits));
    const double diff = (encoded.amplitudes() - c.state.amplitudes()).cwiseAbs().maxCoeff();
    if (diff > kCodewordTolerance) {
      res.fail({{"logical_bits", c.logical_bits}, {"max_amplitude_error", diff}});
    }
  }
  return res;
}

PropertyResult check_correction_tables() {
  PropertyResult res{"correction_tables"};
  for (int pos = 0; pos < losscode::kDataQubits; ++pos) {
    ++res.checks;
    try {
      const auto derived = losscode::derive_correction_table(pos);
      if (!(derived == losscode::shipped_correction_table(pos))) {
        res.fail(json::parse(losscode::correction_tables_json({derived})));
      }
    } catch (const DerivationError& e) {
      res.fail({{"loss_position", pos}, {"error", e.what()}});
    }
  }
  return res;
}

std::pair<PropertyResult, PropertyResult> check_recovery(int trials, std::uint64_t seed) {
  PropertyResult round_trip{"round_trip"};
  PropertyResult uniform{"outcome_uniformity"};
  const std::vector<int> ancillae{losscode::kXAncilla, losscode::kZAncilla};
  for (int t = 0; t < trials; ++t) {
    auto rng = RandomStream::for_trial(seed, static_cast<std::uint64_t>(t));
    const auto logical = PureState::random(losscode::kLogicalQubits, rng);
    const auto encoded = losscode::encode(logical);
    const auto rho = DensityMatrix::from_pure(encoded);
    for (int pos = 0; pos < losscode::kDataQubits; ++pos) {
      const auto damaged = partial_trace(rho, pos);
      const auto probs = outcome_probabilities(losscode::recovery_stages(damaged, pos).before_measurement, ancillae);
      for (std::uint32_t o = 0; o < probs.size(); ++o) {
        ++uniform.checks;
        if (std::abs(probs[o] - 0.25) > kUniformityTolerance) {
          uniform.fail({{"trial", t}, {"loss_position", pos}, {"outcome", o}, {"probability", probs[o]},
                        {"input", amplitudes_json(logical)}});
        }
      }
      for (std::uint32_t o = 0; o < 4; ++o) {
        ++round_trip.checks;
        json example{{"trial", t}, {"loss_position", pos}, {"outcome", o}, {"input", amplitudes_json(logical)}};
        try {
          losscode::RecoverOptions opts;
          opts.forced_outcome = o;
          const auto result = losscode::recover(damaged, pos, rng, opts);
          const double fid = fidelity(result.corrected_state, encoded);
          if (std::abs(1.0 - fid) > kFidelityTolerance) {
            example["fidelity"] = fid;
            round_trip.fail(example);
          }
        } catch (const std::runtime_error& e) {
          example["error"] = e.what();
          round_trip.fail(example);
        }
      }
    }
  }
  return {round_trip, uniform};
}

int verify_lookup(const VerifyOptions& o, std::ostream& out) {
  if (o.qubit_loss < 0 || o.qubit_loss >= losscode::kDataQubits) throw UsageError("--qubit-loss must be 0..3");
  const auto table = losscode::derive_correction_table(o.qubit_loss);
  std::vector<std::uint32_t> outcomes{0, 1, 2, 3};
  if (!o.outcome.empty()) outcomes = {parse_outcome_bits(o.outcome)};

  std::optional<losscode::PauliWord> expected;
  if (!o.expect.empty()) {
    try {
      expected = losscode::pauli_from_string(o.expect);
    } catch (const DomainError& e) {
      throw UsageError(std::string("--expect: ") + e.what());
    }
    if (o.outcome.empty()) throw UsageError("--expect needs --outcome");
  }

  std::ostringstream text;
  json records = json::array();
  bool ok = true;
  for (std::uint32_t outcome : outcomes) {
    const auto word = table.correction(outcome);
    const std::string bits = (outcome & 2u ? "1" : "0") + std::string(outcome & 1u ? "1" : "0");
    text << "loss position " << o.qubit_loss << ", outcome " << bits << ": apply " << losscode::to_string(word);
    if (word == losscode::PauliWord::X) text << " (sigma_x)";
    if (word == losscode::PauliWord::Z) text << " (sigma_z)";
    if (word == losscode::PauliWord::XZ) text << " (sigma_z then sigma_x)";
    text << '\n';
    json rec{{"loss_position", o.qubit_loss}, {"outcome_bits", bits}, {"pauli_word", losscode::to_string(word)}};
    if (expected) {
      const bool match = *expected == word;
      ok = ok && match;
      rec["expected"] = losscode::to_string(*expected);
      rec["matches"] = match;
      text << (match ? "PASS" : "FAIL") << " expected " << losscode::to_string(*expected) << '\n';
    }
    records.push_back(rec);
  }
  emit(o.format == "json" ? records.dump(2) + "\n" : text.str(), o.out, out);
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  if (o.list_tables) {
    std::vector<losscode::CorrectionTable> tables;
    for (int pos = 0; pos < losscode::kDataQubits; ++pos) tables.push_back(losscode::derive_correction_table(pos));
    emit(losscode::correction_tables_json(tables) + "\n", o.out, out);
    return kExitOk;
  }
  if (o.qubit_loss >= 0 || !o.outcome.empty() || !o.expect.empty()) {
    if (o.qubit_loss < 0) throw UsageError("--outcome and --expect need --qubit-loss");
    return verify_lookup(o, out);
  }
  if (o.trials < 1) throw UsageError("--trials must be at least 1");

  std::vector<PropertyResult> results{check_codewords(), check_correction_tables()};
  auto [round_trip, uniform] = check_recovery(o.trials, o.seed);
  results.push_back(std::move(round_trip));
  results.push_back(std::move(uniform));

  int failed = 0;
  std::ostringstream text;
  json report{{"command", "verify"}, {"trials", o.trials}, {"seed", o.seed}, {"properties", json::array()}};
  for (const auto& r : results) {
    failed += r.passed ? 0 : 1;
    text << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.checks << " checks)";
    if (!r.passed) text << " first counterexample: " << r.counterexample.dump();
    text << '\n';
    json entry{{"name", r.name}, {"passed", r.passed}, {"checks", r.checks}};
    if (!r.passed) entry["counterexample"] = r.counterexample;
    report["properties"].push_back(entry);
  }
  report["passed"] = failed == 0;
  if (failed == 0) {
    text << "verify: all " << results.size() << " properties passed\n";
  } else {
    text << "verify: " << failed << " of " << results.size() << " properties failed\n";
  }
  emit(o.format == "json" ? report.dump(2) + "\n" : text.str(), o.out, out);
  return failed == 0 ? kExitOk : kExitVerificationFailed;
}

// ---------- sweep-r ----------

struct SweepROptions {
  double x_min = 0.01;
  double x_max = 3.0;
  int x_steps = 300;
  std::string x_scale = "log";
  double pt_min = 0.5;
  double pt_max = 1.0;
  int pt_steps = 200;
  std::string pt_scale = "linear";
  std::string format = "csv";
  std::string out;
  std::string contour_out;
};

std::vector<double> make_grid(double lo, double hi, int steps, const std::string& scale) {
  return scale == "log" ? log_steps(lo, hi, steps) : linear_steps(lo, hi, steps);
}

int cmd_sweep_r(const SweepROptions& o, std::ostream& out) {
  if (!(o.x_min > 0.0)) throw UsageError("--x-min must be positive");
  if (!(o.pt_min > 0.0) || o.pt_max > 1.0) throw UsageError("p_t range must lie in (0, 1]");
  const auto xs = make_grid(o.x_min, o.x_max, o.x_steps, o.x_scale);
  const auto pts = make_grid(o.pt_min, o.pt_max, o.pt_steps, o.pt_scale);

  // The r = 1 contour in closed form at every grid x where it exists.
  const double ln3 = std::log(3.0);
  std::vector<std::pair<double, double>> contour;
  for (double x : xs) {
    if (x <= ln3) contour.emplace_back(x, analytics::r_unity_contour(x));
  }
  std::optional<std::pair<double, double>> grid_min;
  for (const auto& p : contour) {
    if (!grid_min || p.second < grid_min->second) grid_min = p;
  }
  std::optional<analytics::ContourMinimum> searched;
  if (o.x_min < ln3) searched = analytics::r_unity_contour_minimum(o.x_min, o.x_max);

  if (o.format == "json") {
    json doc{{"command", "sweep-r"},
             {"x", {{"min", o.x_min}, {"max", o.x_max}, {"steps", o.x_steps}, {"scale", o.x_scale}}},
             {"p_t", {{"min", o.pt_min}, {"max", o.pt_max}, {"steps", o.pt_steps}, {"scale", o.pt_scale}}},
             {"columns", {"x", "p_t", "r"}},
             {"rows", json::array()}};
    for (double x : xs) {
      for (double pt : pts) doc["rows"].push_back({x, pt, analytics::r(x, pt)});
    }
    json c{{"points", json::array()}};
    for (const auto& [x, pt] : contour) c["points"].push_back({x, pt});
    if (grid_min) c["grid_minimum"] = {{"x", grid_min->first}, {"p_t", grid_min->second}};
    if (searched) c["minimum"] = {{"x", searched->x}, {"p_t", searched->p_t}};
    doc["r_unity_contour"] = c;
    emit(doc.dump(2) + "\n", o.out, out);
    return kExitOk;
  }

  std::string csv = "x,p_t,r\n";
  csv.reserve(xs.size() * pts.size() * 64);
  for (double x : xs) {
    for (double pt : pts) {
      csv += format_number(x) + ',' + format_number(pt) + ',' + format_number(analytics::r(x, pt)) + '\n';
    }
  }
  emit(csv, o.out, out);

  std::string contour_path = o.contour_out;
  if (contour_path.empty() && !o.out.empty() && o.out != "-") contour_path = o.out + ".contour.csv";
  if (!contour_path.empty()) {
    std::string text = "x,p_t\n";
    for (const auto& [x, pt] : contour) text += format_number(x) + ',' + format_number(pt) + '\n';
    emit(text, contour_path, out);
  }
  if (!o.out.empty() && o.out != "-") {
    out << "wrote " << xs.size() * pts.size() << " rows to " << o.out << '\n';
    if (!contour_path.empty()) out << "wrote " << contour.size() << " r = 1 contour points to " << contour_path << '\n';
    if (searched) out << "r = 1 contour minimum: p_t = " << format_number(searched->p_t) << " at x = "
                      << format_number(searched->x) << '\n';
  }
  return kExitOk;
}

// ---------- sweep-pt ----------

struct SweepPtOptions {
  int n_min = 1;
  int n_max = 1000;
  int n_steps = 200;
  std::vector<int> n_values;
  std::vector<double> etas{1.0, 1.0 - 1e-6, 1.0 - 1e-5, 1.0 - std::pow(10.0, -4.5)};
  double p_one = 1.0;
  double p_spg = 1.0;
  std::string format = "csv";
  std::string out;
};

int cmd_sweep_pt(const SweepPtOptions& o, std::ostream& out) {
  std::vector<int> ns = o.n_values;
  if (ns.empty()) {
    if (o.n_min < 1) throw UsageError("--n-min must be at least 1");
    ns = log_integer_steps(o.n_min, o.n_max, o.n_steps);
  }
  for (int n : ns) {
    if (n < 1) throw UsageError("every n must be at least 1");
  }
  for (double eta : o.etas) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw UsageError("every eta must lie in [0, 1]");
  }
  const auto value = [&](int n, double eta) {
    TransponderParams p;
    p.n = n;
    p.eta = eta;
    p.p_one = o.p_one;
    p.p_spg = o.p_spg;
    return analytics::p_t_full(p);
  };

  if (o.format == "json") {
    json doc{{"command", "sweep-pt"}, {"p_one", o.p_one}, {"p_spg", o.p_spg}, {"reference_p_t", kReferencePt},
             {"curves", json::array()}};
    for (double eta : o.etas) {
      json curve{{"eta", eta}, {"n", json::array()}, {"p_t_full", json::array()}};
      for (int n : ns) {
        curve["n"].push_back(n);
        curve["p_t_full"].push_back(value(n, eta));
      }
      doc["curves"].push_back(curve);
    }
    emit(doc.dump(2) + "\n", o.out, out);
    return kExitOk;
  }

  std::string csv = "n,eta,p_t_full\n";
  for (double eta : o.etas) {
    for (int n : ns) csv += std::to_string(n) + ',' + format_number(eta) + ',' + format_number(value(n, eta)) + '\n';
  }
  emit(csv, o.out, out);
  if (!o.out.empty() && o.out != "-") {
    out << "wrote " << ns.size() * o.etas.size() << " rows to " << o.out << '\n';
    out << "reference p_t = " << kReferencePt << '\n';
  }
  return kExitOk;
}

// ---------- chain / loop ----------

struct SimOptions {
  std::string config;
  CLI::Option* stages = nullptr;
  CLI::Option* trials = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* mode = nullptr;
  CLI::Option* policy = nullptr;
  CLI::Option* p_t = nullptr;
  CLI::Option* cycle_cap = nullptr;
  int stages_value = 1;
  std::int64_t trials_value = 0;
  std::uint64_t seed_value = 0;
  std::string mode_value;
  std::string policy_value;
  double p_t_value = 1.0;
  std::int64_t cycle_cap_value = 0;
  int threads = 0;
  bool threshold = false;
  bool compare = false;
  std::string out;
};

chainsim::ChainConfig resolve_config(const SimOptions& o) {
  chainsim::ChainConfig c = o.config.empty() ? chainsim::ChainConfig{} : load_chain_config(o.config);
  if (o.stages->count()) c.num_stages = o.stages_value;
  if (o.trials->count()) c.trials = o.trials_value;
  if (o.seed->count()) c.seed = o.seed_value;
  if (o.mode->count()) c.mode = channel::gate_failure_mode_from_string(o.mode_value);
  if (o.policy->count()) c.policy = gate_policy_from_string(o.policy_value);
  if (o.p_t->count()) c.p_t_override = o.p_t_value;
  if (o.cycle_cap && o.cycle_cap->count()) c.loop_cycle_cap = o.cycle_cap_value;
  c.threads = o.threads;
  c.validate();
  return c;
}

json config_json(const chainsim::ChainConfig& c) {
  json j{{"alpha", c.params.alpha}, {"d", c.params.d}, {"n", c.params.n}, {"eta", c.params.eta},
         {"p_one", c.params.p_one}, {"p_spg", c.params.p_spg}, {"nu", c.params.nu},
         {"num_stages", c.num_stages}, {"trials", c.trials}, {"seed", c.seed},
         {"mode", channel::to_string(c.mode)}, {"policy", to_string(c.policy)},
         {"p_t", c.p_t_override ? json(*c.p_t_override) : json(nullptr)},
         {"loop_cycle_cap", c.loop_cycle_cap}, {"max_stage_evaluations", c.max_stage_evaluations}};
  j["logical_input"] = amplitudes_json(c.input_state());
  return j;
}

json estimate_json(const chainsim::Estimate& e) { return {{"value", e.value}, {"standard_error", e.standard_error}}; }

json stats_json(const chainsim::ChainStats& s) {
  json j{{"trials", s.trials}, {"successes", s.successes}, {"stage_attempts", s.stage_attempts},
         {"intact", s.intact}, {"corrected", s.corrected}, {"failed_multi_loss", s.failed_multi_loss},
         {"failed_gates", s.failed_gates}, {"per_stage_success", estimate_json(s.per_stage_success)},
         {"end_to_end_success", estimate_json(s.end_to_end_success)}};
  j["mean_fidelity_given_success"] =
      s.mean_fidelity_given_success ? json(*s.mean_fidelity_given_success) : json(nullptr);
  j["min_fidelity_given_success"] = s.min_fidelity_given_success ? json(*s.min_fidelity_given_success) : json(nullptr);
  j["empirical_alpha_prime"] = number_or_null(s.empirical_alpha_prime);
  j["alpha_prime_infinite"] = s.alpha_prime_infinite;
  return j;
}

json prediction_json(const chainsim::Prediction& p) {
  return {{"survival", p.survival}, {"p_f", p.p_f}, {"p_t", p.p_t}, {"stage_success", p.stage_success},
          {"end_to_end", p.end_to_end}, {"alpha_prime_effective", number_or_null(p.alpha_prime_effective)}};
}

double z_score(const chainsim::Estimate& e, double want) {
  if (e.standard_error > 0.0) return (e.value - want) / e.standard_error;
  return e.value == want ? 0.0 : std::numeric_limits<double>::infinity();
}

json threshold_json() {
  const int n = analytics::threshold_n();
  return {{"n", n},
          {"ancilla_qubits", 2 * n},
          {"min_r_at_n", analytics::min_r_over_x(analytics::p_t_aggregate(n)).r_star},
          {"min_r_at_n_minus_1", analytics::min_r_over_x(analytics::p_t_aggregate(n - 1)).r_star},
          {"summary", "n = " + std::to_string(n) + ", at least " + std::to_string(2 * n) +
                          " ancilla qubits per two-qubit gate"}};
}

int cmd_chain(const SimOptions& o, std::ostream& out) {
  const auto config = resolve_config(o);
  json doc{{"command", "chain"}, {"config", config_json(config)},
           {"assumptions", {{"nu_km_per_s", config.params.nu}}}};
  if (o.threshold) doc["threshold"] = threshold_json();

  const auto stats = chainsim::run_chain(config);
  const auto pred = chainsim::predict(config);
  doc["empirical"] = stats_json(stats);
  doc["analytic"] = prediction_json(pred);
  const double z_stage = z_score(stats.per_stage_success, pred.stage_success);
  const double z_end = z_score(stats.end_to_end_success, pred.end_to_end);
  doc["agreement"] = {{"per_stage_z", number_or_null(z_stage)},
                      {"end_to_end_z", number_or_null(z_end)},
                      {"within_3_sigma", std::abs(z_stage) <= 3.0 && std::abs(z_end) <= 3.0}};
  if (o.compare) {
    auto cmp_config = config;
    cmp_config.p_t_override.reset();
    const auto cmp = chainsim::compare_modes(cmp_config);
    doc["mode_comparison"] = {{"aggregate", estimate_json(cmp.aggregate.end_to_end_success)},
                              {"per_gate", estimate_json(cmp.per_gate.end_to_end_success)},
                              {"z_score", number_or_null(cmp.z_score)},
                              {"agree", cmp.agree},
                              {"report", cmp.report}};
  }
  emit(doc.dump(2) + "\n", o.out, out);
  return kExitOk;
}

int cmd_loop(const SimOptions& o, std::ostream& out) {
  const auto config = resolve_config(o);
  const auto s = chainsim::run_loop(config);
  json doc{{"command", "loop"}, {"config", config_json(config)},
           {"assumptions", {{"nu_km_per_s", config.params.nu}}}};
  doc["empirical"] = {{"trials", s.trials},
                      {"mean_cycles", estimate_json(s.mean_cycles)},
                      {"censored", s.censored},
                      {"censored_fraction", s.censored_fraction},
                      {"implied_storage_time_s", s.implied_storage_time}};
  doc["analytic"] = {{"cycle_success_probability", s.cycle_success_probability},
                     {"mean_cycles", number_or_null(s.analytic_mean_cycles)},
                     {"storage_time_s", number_or_null(s.analytic_storage_time)}};
  if (config.params.alpha > 0.0) {
    doc["analytic"]["unprotected_storage_time_s"] = analytics::storage_time(config.params.alpha, config.params.nu);
  }
  const double ratio = s.implied_storage_time / s.analytic_storage_time;
  doc["agreement"] = {{"storage_time_ratio", number_or_null(ratio)},
                      {"mean_cycles_z", number_or_null(z_score(s.mean_cycles, s.analytic_mean_cycles))}};
  emit(doc.dump(2) + "\n", o.out, out);
  return kExitOk;
}

// ---------- resources ----------

struct ResourcesOptions {
  std::string level;
  int n = 56;
  bool all = false;
  std::string format = "csv";
  std::string out;
};

int cmd_resources(const ResourcesOptions& o, std::ostream& out) {
  std::vector<analytics::ReductionLevel> levels;
  if (o.all || o.level.empty()) {
    levels = {analytics::ReductionLevel::raw, analytics::ReductionLevel::i, analytics::ReductionLevel::ii,
              analytics::ReductionLevel::iii};
  } else {
    levels = {analytics::reduction_level_from_string(o.level)};
  }
  std::string csv = "level,spg,qnd,cnot,cz,one_qubit,pd,n\n";
  json rows = json::array();
  for (auto level : levels) {
    const auto c = analytics::resources(o.n, level);
    csv += analytics::to_string(level) + ',' + std::to_string(c.spg) + ',' + std::to_string(c.qnd) + ',' +
           std::to_string(c.cnot) + ',' + std::to_string(c.cz) + ',' + std::to_string(c.one_qubit) + ',' +
           std::to_string(c.pd) + ',' + std::to_string(o.n) + '\n';
    rows.push_back({{"level", analytics::to_string(level)}, {"n", o.n}, {"spg", c.spg}, {"qnd", c.qnd},
                    {"cnot", c.cnot}, {"cz", c.cz}, {"one_qubit", c.one_qubit}, {"pd", c.pd}});
  }
  emit(o.format == "json" ? rows.dump(2) + "\n" : csv, o.out, out);
  return kExitOk;
}

// ---------- threshold ----------

struct ThresholdOptions {
  double tolerance = analytics::kMinimizerTolerance;
  std::string format = "text";
  std::string out;
};

int cmd_threshold(const ThresholdOptions& o, std::ostream& out) {
  if (!(o.tolerance > 0.0)) throw UsageError("--tolerance must be positive");
  const int n = analytics::threshold_n(o.tolerance);
  const auto at = analytics::min_r_over_x(analytics::p_t_aggregate(n), o.tolerance);
  const auto below = analytics::min_r_over_x(analytics::p_t_aggregate(n - 1), o.tolerance);
  if (o.format == "json") {
    json doc{{"n", n}, {"ancilla_qubits", 2 * n}, {"p_t", analytics::p_t_aggregate(n)},
             {"x_star", at.x_star}, {"min_r", at.r_star}, {"min_r_at_n_minus_1", below.r_star}};
    emit(doc.dump(2) + "\n", o.out, out);
    return kExitOk;
  }
  std::ostringstream text;
  text << "threshold n = " << n << '\n'
       << "at least " << 2 * n << " ancilla qubits per two-qubit gate\n"
       << "n = " << n << ": p_t = " << format_number(analytics::p_t_aggregate(n))
       << ", min r = " << format_number(at.r_star) << " at x = " << format_number(at.x_star) << '\n'
       << "n = " << n - 1 << ": min r = " << format_number(below.r_star) << '\n';
  emit(text.str(), o.out, out);
  return kExitOk;
}

void add_format(CLI::App* cmd, std::string& target, std::vector<std::string> choices) {
  cmd->add_option("--format", target, "Output format")->check(CLI::IsMember(std::move(choices)))->capture_default_str();
}

void add_sim_options(CLI::App* cmd, SimOptions& o, bool loop) {
  cmd->add_option("--config", o.config, "Flat JSON configuration file")->check(CLI::ExistingFile);
  o.stages = cmd->add_option("--stages", o.stages_value, "Number of transponder stages")->check(CLI::PositiveNumber);
  o.trials = cmd->add_option("--trials", o.trials_value, "Monte Carlo trials")->check(CLI::PositiveNumber);
  o.seed = cmd->add_option("--seed", o.seed_value, "Base random seed");
  o.mode = cmd->add_option("--mode", o.mode_value, "aggregate_pt or per_gate")
               ->check(CLI::IsMember({"aggregate_pt", "aggregate", "per_gate"}));
  o.policy = cmd->add_option("--policy", o.policy_value, "every_stage or on_loss_only")
                 ->check(CLI::IsMember({"every_stage", "on_loss_only"}));
  o.p_t = cmd->add_option("--p-t", o.p_t_value, "Fixed transponder success probability")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--threads", o.threads, "Worker threads (0: LOSSGUARD_THREADS or hardware)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", o.out, "Output file (default stdout)");
  if (loop) {
    o.cycle_cap = cmd->add_option("--cycle-cap", o.cycle_cap_value, "Cycles after which a trial is censored")
                      ->check(CLI::PositiveNumber);
  } else {
    cmd->add_flag("--threshold", o.threshold, "Also report the ancilla threshold");
    cmd->add_flag("--compare-modes", o.compare, "Also run aggregate and per-gate sampling side by side");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-to-four photon-loss code simulator and transponder analytics", "lossguard"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check encoding, recovery and correction tables");
  auto* loss_opt = verify_cmd->add_option("--qubit-loss", verify.qubit_loss, "Look up corrections for this lost rail")
                       ->check(CLI::Range(0, 3));
  verify_cmd->add_option("--outcome", verify.outcome, "Ancilla outcome bits, e.g. 01")->needs(loss_opt);
  verify_cmd->add_option("--expect", verify.expect, "Required correction (I, X, Z, XZ); exit 1 otherwise");
  verify_cmd->add_flag("--list-tables", verify.list_tables, "Print all derived correction tables as JSON");
  verify_cmd->add_option("--trials", verify.trials, "Random inputs for the round-trip suite")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "Base random seed")->capture_default_str();
  add_format(verify_cmd, verify.format, {"text", "json"});
  verify_cmd->add_option("--out", verify.out, "Output file (default stdout)");

  SweepROptions sweep_r;
  auto* sweep_r_cmd = app.add_subcommand("sweep-r", "Tabulate r(x, p_t) and the r = 1 contour");
  sweep_r_cmd->add_option("--x-min", sweep_r.x_min)->capture_default_str();
  sweep_r_cmd->add_option("--x-max", sweep_r.x_max)->capture_default_str();
  sweep_r_cmd->add_option("--x-steps", sweep_r.x_steps)->capture_default_str();
  sweep_r_cmd->add_option("--x-scale", sweep_r.x_scale)->check(CLI::IsMember({"log", "linear"}))->capture_default_str();
  sweep_r_cmd->add_option("--pt-min", sweep_r.pt_min)->capture_default_str();
  sweep_r_cmd->add_option("--pt-max", sweep_r.pt_max)->capture_default_str();
  sweep_r_cmd->add_option("--pt-steps", sweep_r.pt_steps)->capture_default_str();
  sweep_r_cmd->add_option("--pt-scale", sweep_r.pt_scale)->check(CLI::IsMember({"log", "linear"}))->capture_default_str();
  add_format(sweep_r_cmd, sweep_r.format, {"csv", "json"});
  sweep_r_cmd->add_option("--out", sweep_r.out, "Output file (default stdout)");
  sweep_r_cmd->add_option("--contour-out", sweep_r.contour_out,
                          "Contour CSV (default <out>.contour.csv when --out is given)");

  SweepPtOptions sweep_pt;
  auto* sweep_pt_cmd = app.add_subcommand("sweep-pt", "Tabulate p_t against ancilla count and detector efficiency");
  sweep_pt_cmd->add_option("--n-min", sweep_pt.n_min)->capture_default_str();
  sweep_pt_cmd->add_option("--n-max", sweep_pt.n_max)->capture_default_str();
  sweep_pt_cmd->add_option("--n-steps", sweep_pt.n_steps)->capture_default_str();
  sweep_pt_cmd->add_option("--n-values", sweep_pt.n_values, "Explicit n list (overrides the log grid)")
      ->delimiter(',');
  sweep_pt_cmd->add_option("--eta", sweep_pt.etas, "Detector efficiencies")->delimiter(',');
  sweep_pt_cmd->add_option("--p-one", sweep_pt.p_one)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sweep_pt_cmd->add_option("--p-spg", sweep_pt.p_spg)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  add_format(sweep_pt_cmd, sweep_pt.format, {"csv", "json"});
  sweep_pt_cmd->add_option("--out", sweep_pt.out, "Output file (default stdout)");

  SimOptions chain;
  auto* chain_cmd = app.add_subcommand("chain", "Monte Carlo transponder chain with analytic predictions");
  add_sim_options(chain_cmd, chain, false);

  SimOptions loop;
  auto* loop_cmd = app.add_subcommand("loop", "Monte Carlo fiber-loop memory");
  add_sim_options(loop_cmd, loop, true);

  ResourcesOptions resources;
  auto* resources_cmd = app.add_subcommand("resources", "Component counts per transponder");
  resources_cmd->add_option("--level", resources.level, "raw, i, ii or iii")
      ->check(CLI::IsMember({"raw", "i", "ii", "iii"}));
  resources_cmd->add_option("--n", resources.n, "Ancilla pairs per two-qubit gate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  resources_cmd->add_flag("--all", resources.all, "Every reduction level (the default without --level)");
  add_format(resources_cmd, resources.format, {"csv", "json"});
  resources_cmd->add_option("--out", resources.out, "Output file (default stdout)");

  ThresholdOptions threshold;
  auto* threshold_cmd = app.add_subcommand("threshold", "Smallest ancilla count for which transponders help");
  threshold_cmd->add_option("--tolerance", threshold.tolerance, "Minimizer x tolerance")->capture_default_str();
  add_format(threshold_cmd, threshold.format, {"text", "json"});
  threshold_cmd->add_option("--out", threshold.out, "Output file (default stdout)");

  std::vector<std::string> argv_storage{"lossguard"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*verify_cmd) return cmd_verify(verify, out);
    if (*sweep_r_cmd) return cmd_sweep_r(sweep_r, out);
    if (*sweep_pt_cmd) return cmd_sweep_pt(sweep_pt, out);
    if (*chain_cmd) return cmd_chain(chain, out);
    if (*loop_cmd) return cmd_loop(loop, out);
    if (*resources_cmd) return cmd_resources(resources, out);
    if (*threshold_cmd) return cmd_threshold(threshold, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitVerificationFailed;
  }
  err << "error: no subcommand\n";
  return kExitUsage;
}

}  // namespace lossguard::cli
