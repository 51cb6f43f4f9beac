#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "riskdyn/energy_scenario.hpp"
#include "riskdyn/keyvalue.hpp"

namespace riskdyn {

/// Text of the shipped default scenario (identical to configs/default.cfg).
std::string default_config_text();

/// Canonical document holding every key of the scenario schema.
KeyValueDocument config_document(const ScenarioConfig& config);

/// Keys absent from `doc` keep their defaults; unknown keys are rejected.
ScenarioConfig scenario_from_document(const KeyValueDocument& doc);

/// Reads a config file, or the built-in defaults when `source` is "default".
ScenarioConfig load_scenario(const std::string& source);

/// Fully qualified `section.key` names an assignment refers to. Accepts
/// `section.key`, a bare `key`, and either form without its unit suffix
/// (`dt` for `integrator.dt_s`). Throws ConfigError when nothing or more than
/// one key matches.
std::string resolve_config_key(const KeyValueDocument& doc, std::string_view name);

/// Applies `key=value` assignments onto a config.
ScenarioConfig apply_overrides(const ScenarioConfig& config, const std::vector<std::string>& assignments);

/// Same as apply_overrides for a single resolved key.
ScenarioConfig with_value(const ScenarioConfig& config, const std::string& qualified_key,
                          const std::string& value);

/// Whether a qualified key names a physical scenario parameter that can be
/// swept (numeric, outside the integrator and metrics sections).
bool is_sweepable(const std::string& qualified_key);

std::string serialize_config(const ScenarioConfig& config);

/// FNV-1a 64-bit digest of the canonical config text, as "fnv1a64:<hex>".
std::string config_digest(const ScenarioConfig& config);
std::string text_digest(std::string_view text);

}  // namespace riskdyn
