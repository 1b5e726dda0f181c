#pragma once

#include <string>

#include "v2csim/sim.hpp"

namespace v2csim {

// JSON config loading/saving; unknown keys are rejected with field-level
// messages. Missing keys keep their defaults.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);
std::string config_to_json(const ScenarioConfig& cfg);

// metrics report as JSON with all fields and counts
std::string metrics_to_json(const MetricsReport& m);

std::string fit_result_to_json(const FitResult& r);

}  // namespace v2csim
