#include "lossguard_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lossguard::cli {

namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kKnownKeys{
    "alpha", "d", "n", "eta", "p_one", "p_spg", "nu",
    "num_stages", "trials", "seed", "mode", "policy", "p_t", "loop_cycle_cap",
    "max_stage_evaluations", "logical_input"};

class Reader {
 public:
  Reader(const json& doc, std::string_view source) : doc_(doc), source_(source) {}

  [[noreturn]] void fail(std::string_view key, std::string_view what) const {
    throw ConfigError(std::string(source_) + ": field '" + std::string(key) + "': " + std::string(what));
  }

  void number(std::string_view key, double& target) const {
    const auto it = doc_.find(key);
    if (it == doc_.end()) return;
    if (!it->is_number()) fail(key, "expected a number");
    target = it->get<double>();
  }

  template <typename Int>
  void integer(std::string_view key, Int& target) const {
    const auto it = doc_.find(key);
    if (it == doc_.end()) return;
    if (!it->is_number_integer()) fail(key, "expected an integer");
    if (it->is_number_unsigned()) {
      target = static_cast<Int>(it->get<std::uint64_t>());
    } else {
      target = static_cast<Int>(it->get<std::int64_t>());
    }
  }

  const json* string(std::string_view key) const {
    const auto it = doc_.find(key);
    if (it == doc_.end()) return nullptr;
    if (!it->is_string()) fail(key, "expected a string");
    return &*it;
  }

  const json* find(std::string_view key) const {
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

 private:
  const json& doc_;
  std::string_view source_;
};

PureState read_logical_input(const json& value, const Reader& reader) {
  if (!value.is_array() || value.size() != 4) reader.fail("logical_input", "expected four [re, im] pairs");
  Vector amps(4);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& pair = value[i];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      reader.fail("logical_input", "entry " + std::to_string(i) + " is not an [re, im] pair");
    }
    amps(static_cast<Eigen::Index>(i)) = Complex(pair[0].get<double>(), pair[1].get<double>());
  }
  try {
    return PureState(2, amps);
  } catch (const DomainError& e) {
    reader.fail("logical_input", e.what());
  }
}

}  // namespace

channel::GatePolicy gate_policy_from_string(std::string_view text) {
  if (text == "every_stage") return channel::GatePolicy::every_stage;
  if (text == "on_loss_only") return channel::GatePolicy::on_loss_only;
  throw DomainError("unknown gate policy '" + std::string(text) + "' (expected every_stage or on_loss_only)");
}

std::string to_string(channel::GatePolicy policy) {
  return policy == channel::GatePolicy::every_stage ? "every_stage" : "on_loss_only";
}

chainsim::ChainConfig parse_chain_config(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(std::string(source) + ": top level must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError(std::string(source) + ": unknown field '" + key + "'");
  }

  const Reader in(doc, source);
  chainsim::ChainConfig c;
  in.number("alpha", c.params.alpha);
  in.number("d", c.params.d);
  in.integer("n", c.params.n);
  in.number("eta", c.params.eta);
  in.number("p_one", c.params.p_one);
  in.number("p_spg", c.params.p_spg);
  in.number("nu", c.params.nu);
  in.integer("num_stages", c.num_stages);
  in.integer("trials", c.trials);
  in.integer("seed", c.seed);
  in.integer("loop_cycle_cap", c.loop_cycle_cap);
  in.integer("max_stage_evaluations", c.max_stage_evaluations);
  try {
    if (const auto* v = in.string("mode")) c.mode = channel::gate_failure_mode_from_string(v->get<std::string>());
  } catch (const DomainError& e) {
    in.fail("mode", e.what());
  }
  try {
    if (const auto* v = in.string("policy")) c.policy = gate_policy_from_string(v->get<std::string>());
  } catch (const DomainError& e) {
    in.fail("policy", e.what());
  }
  if (in.find("p_t")) {
    double p_t = 0.0;
    in.number("p_t", p_t);
    c.p_t_override = p_t;
  }
  if (const auto* v = in.find("logical_input")) c.logical_input = read_logical_input(*v, in);

  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return c;
}

chainsim::ChainConfig load_chain_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << file.rdbuf();
  return parse_chain_config(text.str(), path);
}

}  // namespace lossguard::cli
