#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>

namespace chattox::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestFile = "run_manifest.json";

struct StageRecord {
  std::string started_at;
  std::string finished_at;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
};

/// Provenance for everything under the reports directory. Report files carry
/// the digests; only the manifest carries timestamps.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_digest;
  std::string corpus_digest;
  std::map<std::string, StageRecord> stages;
};

std::string utc_timestamp(std::chrono::system_clock::time_point t);

/// An absent file yields an empty manifest.
RunManifest load_run_manifest(const std::filesystem::path& path);
void save_run_manifest(const RunManifest& manifest, const std::filesystem::path& path);

nlohmann::ordered_json to_json(const RunManifest& manifest);

}  // namespace chattox::cli
