#pragma once

// Flat JSON run configuration. Keys are the TransponderParams field names
// plus the chain fields below; unknown keys are rejected.
//
//   alpha d n eta p_one p_spg nu
//   num_stages trials seed mode policy p_t loop_cycle_cap
//   max_stage_evaluations logical_input
//
// mode is "aggregate_pt" or "per_gate", policy is "every_stage" or
// "on_loss_only", p_t fixes the transponder success probability, and
// logical_input is four [re, im] amplitudes.

#include <stdexcept>
#include <string>
#include <string_view>

#include "lossguard/chainsim.hpp"

namespace lossguard::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

chainsim::ChainConfig parse_chain_config(std::string_view text, std::string_view source = "config");
chainsim::ChainConfig load_chain_config(const std::string& path);

channel::GatePolicy gate_policy_from_string(std::string_view text);
std::string to_string(channel::GatePolicy policy);

}  // namespace lossguard::cli
