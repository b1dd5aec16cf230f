#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace xdr {

// Shortest round-trip decimal form (to_chars); infinities print as "inf".
// Used for every CSV/JSON numeric field so emitted artifacts are
// byte-stable and re-parse to the exact same values.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// FNV-1a over the canonical (sorted-key) dump of a JSON document, as a
// 16-hex-digit string. Identifies a run configuration in manifests.
std::string config_hash(const nlohmann::json& config);

} // namespace xdr
