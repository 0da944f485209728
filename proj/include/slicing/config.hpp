#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "slicing/engine.hpp"

namespace slicing {

/// Reads a SimConfig from JSON. Keys mirror the SimConfig field names and
/// every key is optional; missing ones keep their defaults.
///
/// Weight tables may be given inline as rows or as a path, resolved against
/// `base_dir`. `traffic.snr_band` is shorthand for `traffic.snr_range`.
///
/// Throws std::invalid_argument whose message starts with the field path,
/// e.g. "measure_window: must not exceed total_slots". Unknown keys are
/// rejected so that typos do not silently fall back to defaults.
SimConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Parses and validates a config file. Syntax errors carry line and column.
SimConfig load_config(const std::filesystem::path& path);

/// Inverse of config_from_json; tables are written inline.
nlohmann::json config_to_json(const SimConfig& cfg);

nlohmann::json report_to_json(const MetricsReport& report);

}  // namespace slicing
