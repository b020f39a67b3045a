#include "chattox/cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "chattox/digest.hpp"
#include "chattox/error.hpp"

namespace chattox::cli {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

void check_keys(const json& node, const std::string& where, std::set<std::string> allowed) {
  if (!node.is_object()) invalid(where + " must be an object");
  for (const auto& [key, unused] : node.items()) {
    if (!allowed.contains(key)) invalid("unknown key " + where + "." + key);
  }
}

template <typename T>
void read(const json& node, const char* key, const std::string& where, T& out) {
  if (!node.contains(key)) return;
  try {
    out = node.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(where + "." + key + " has the wrong type");
  }
}

void read_path(const json& node, const char* key, const std::string& where,
               const std::filesystem::path& base, std::filesystem::path& out) {
  std::string text;
  read(node, key, where, text);
  if (!node.contains(key)) return;
  std::filesystem::path p(text);
  out = p.is_absolute() ? p : base / p;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "config", {"backend", "classify", "prelabel", "stats", "paths"});
  RunConfig c;
  c.paths.corpus = base_dir / c.paths.corpus;
  c.paths.store = base_dir / c.paths.store;
  c.paths.reports = base_dir / c.paths.reports;

  if (doc.contains("backend")) {
    const json& b = doc["backend"];
    check_keys(b, "backend", {"kind", "url", "model", "max_in_flight", "timeout_s", "max_retries",
                              "backoff_ms", "replay_log", "script", "record_log"});
    std::string kind = "http";
    read(b, "kind", "backend", kind);
    if (kind == "http") c.backend.kind = BackendKind::Http;
    else if (kind == "replay") c.backend.kind = BackendKind::Replay;
    else if (kind == "scripted") c.backend.kind = BackendKind::Scripted;
    else invalid("backend.kind must be http, replay or scripted");
    read(b, "url", "backend", c.backend.url);
    read(b, "model", "backend", c.backend.model);
    read(b, "max_in_flight", "backend", c.backend.max_in_flight);
    read(b, "timeout_s", "backend", c.backend.timeout_s);
    read(b, "max_retries", "backend", c.backend.max_retries);
    read(b, "backoff_ms", "backend", c.backend.backoff_ms);
    read_path(b, "replay_log", "backend", base_dir, c.backend.replay_log);
    read_path(b, "script", "backend", base_dir, c.backend.script);
    read_path(b, "record_log", "backend", base_dir, c.backend.record_log);
  }
  if (doc.contains("classify")) {
    const json& k = doc["classify"];
    check_keys(k, "classify", {"window_s", "context_cap", "temperature"});
    read(k, "window_s", "classify", c.classify.window_s);
    read(k, "context_cap", "classify", c.classify.context_cap);
    read(k, "temperature", "classify", c.classify.temperature);
  }
  if (doc.contains("prelabel")) {
    const json& p = doc["prelabel"];
    check_keys(p, "prelabel", {"allowlist_path", "bots"});
    read_path(p, "allowlist_path", "prelabel", base_dir, c.prelabel.allowlist_path);
    if (p.contains("bots")) {
      std::vector<std::string> bots;
      read(p, "bots", "prelabel", bots);
      c.prelabel.bots = std::move(bots);
    }
  }
  if (doc.contains("stats")) {
    const json& s = doc["stats"];
    check_keys(s, "stats", {"n_perm", "seed", "alpha", "metric", "threads"});
    read(s, "n_perm", "stats", c.stats.n_perm);
    read(s, "seed", "stats", c.stats.seed);
    read(s, "alpha", "stats", c.stats.alpha);
    read(s, "threads", "stats", c.stats.threads);
    std::string metric = "bray_curtis";
    read(s, "metric", "stats", metric);
    if (metric == "bray_curtis") c.stats.metric = stats::Metric::BrayCurtis;
    else if (metric == "euclidean") c.stats.metric = stats::Metric::Euclidean;
    else invalid("stats.metric must be bray_curtis or euclidean");
  }
  if (doc.contains("paths")) {
    const json& p = doc["paths"];
    check_keys(p, "paths", {"corpus", "store", "reports"});
    read_path(p, "corpus", "paths", base_dir, c.paths.corpus);
    read_path(p, "store", "paths", base_dir, c.paths.store);
    read_path(p, "reports", "paths", base_dir, c.paths.reports);
  }

  if (!(c.classify.window_s > 0.0)) invalid("classify.window_s must be > 0");
  if (c.classify.context_cap < 1) invalid("classify.context_cap must be >= 1");
  if (c.stats.n_perm < 1) invalid("stats.n_perm must be >= 1");
  if (!(c.stats.alpha > 0.0 && c.stats.alpha < 1.0)) invalid("stats.alpha must be in (0, 1)");
  if (c.stats.threads < 1) invalid("stats.threads must be >= 1");
  if (c.backend.max_in_flight < 1) invalid("backend.max_in_flight must be >= 1");
  if (!(c.backend.timeout_s > 0.0)) invalid("backend.timeout_s must be > 0");
  if (doc.contains("backend") && c.backend.kind == BackendKind::Http && c.backend.url.empty()) {
    invalid("backend.url is required for the http backend");
  }
  if (c.backend.kind == BackendKind::Replay && c.backend.replay_log.empty()) {
    invalid("backend.replay_log is required for the replay backend");
  }
  if (c.backend.kind == BackendKind::Scripted && c.backend.script.empty()) {
    invalid("backend.script is required for the scripted backend");
  }
  if (const char* key = std::getenv("BACKEND_API_KEY")) c.backend.api_key = key;
  c.digest = sha256_hex(text);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace chattox::cli
