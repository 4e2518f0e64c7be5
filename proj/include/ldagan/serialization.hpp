#pragma once

#include "ldagan/metrics.hpp"
#include "ldagan/neural.hpp"
#include "ldagan/trainer.hpp"

#include <json.hpp>

#include <string>

namespace ldagan {

using Json = nlohmann::ordered_json;

// Training configuration document: every TrainConfig field, nothing else.
Json config_to_json(const TrainConfig& cfg);
// Throws ConfigError naming the missing, unknown, or mistyped key.
TrainConfig config_from_json(const Json& j);
TrainConfig read_config_file(const std::filesystem::path& path);

// The parse helpers below throw ParseError with the JSON path of the
// offending field, prefixed by `path`.
Json mlp_to_json(const MlpParams& params);
MlpParams mlp_from_json(const Json& j, const std::string& path);

Json adam_to_json(const AdamState& state);
AdamState adam_from_json(const Json& j, const std::string& path);

Json checkpoint_to_json(const TrainState& state, const TrainConfig& cfg);
Checkpoint checkpoint_from_json(const Json& j);

// One compact JSON object with exactly the MetricsRecord fields.
std::string metrics_to_jsonl(const MetricsRecord& record);
MetricsRecord metrics_from_json(const Json& j);

Json coverage_to_json(const CoverageReport& report);

} // namespace ldagan
