#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nagata/construction.hpp"
#include "nagata/dimlab.hpp"
#include "nagata/metric_space.hpp"

namespace nagata {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Keys: group, d?, k, M, steps, h1_mode?, verify_radius?, stage_overrides?
/// ({"1": {"a": .., "C": .., "h1": ..}}). Integers may be JSON numbers or
/// decimal strings. Unknown keys are rejected.
TowerConfig tower_config_from_json(const Json& j);
TowerConfig load_tower_config(const std::string& path);
Json to_json(const TowerConfig& config);

Json to_json(const LemmaCertificate& cert);
Json stage_json(const TowerState& tower, const TowerStage& stage);
Json tower_json(const TowerState& tower);
Json to_json(const WitnessReport& report);
Json to_json(const CoverSolution& sol, const FiniteMetricSpace& X);
Json components_json(const FiniteMetricSpace& X, const Rational& s,
                     const std::vector<std::vector<std::size_t>>& components);

/// Two-space indented text with a trailing newline.
std::string dump(const Json& j);

}  // namespace nagata
