#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "selectmax/stats.hpp"

namespace selectmax::stats {

void to_json(nlohmann::json& j, const KsResult& r);
void to_json(nlohmann::json& j, const IndependenceResult& r);
void to_json(nlohmann::json& j, const IndependenceReport& r);
void to_json(nlohmann::json& j, const AtomFrequency& r);

}  // namespace selectmax::stats

namespace selectmax::report {

/// JSON value for a double: non-finite values become their string spelling
/// instead of null so reports can still quote them.
nlohmann::json json_number(double v);

/// Serializes with 2-space indentation and a trailing newline. Keys are
/// emitted in sorted order, so equal values give equal bytes.
std::string dump_json(const nlohmann::json& j);

/// Writes contents to path, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& contents);

/// ISO-8601 UTC wall-clock timestamp. Lives in manifests only; every other
/// artifact must stay byte-reproducible.
std::string timestamp_utc();

}  // namespace selectmax::report
