#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chattox/stats/distance.hpp"

namespace chattox::cli {

enum class BackendKind { Http, Replay, Scripted };

struct BackendConfig {
  BackendKind kind = BackendKind::Http;
  std::string url;
  std::string model;
  std::string api_key;  // only from the BACKEND_API_KEY environment variable
  std::size_t max_in_flight = 1;
  double timeout_s = 60.0;
  std::size_t max_retries = 3;
  std::uint64_t backoff_ms = 1000;
  std::filesystem::path replay_log;  // kind == Replay
  std::filesystem::path script;      // kind == Scripted
  std::filesystem::path record_log;  // optional: capture every exchange here
};

struct ClassifySettings {
  double window_s = 10.0;
  std::size_t context_cap = 50;
  double temperature = 0.0;
};

struct PrelabelSettings {
  std::filesystem::path allowlist_path;  // empty: built-in list
  std::optional<std::vector<std::string>> bots;
};

struct StatsSettings {
  std::size_t n_perm = 9999;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  stats::Metric metric = stats::Metric::BrayCurtis;
  unsigned threads = 1;
};

struct Paths {
  std::filesystem::path corpus = "corpus";
  std::filesystem::path store = "labels.jsonl";
  std::filesystem::path reports = "reports";
};

struct RunConfig {
  BackendConfig backend;
  ClassifySettings classify;
  PrelabelSettings prelabel;
  StatsSettings stats;
  Paths paths;
  std::string digest;  // SHA-256 of the config file bytes
};

/// Parses and validates a JSON config. Relative paths resolve against the
/// config file's directory. Unknown keys and out-of-range values are
/// Error(ConfigInvalid); a missing file is Error(ConfigInvalid) as well.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);

}  // namespace chattox::cli
