#include "chattox/cli/manifest.hpp"

#include <ctime>
#include <fstream>

#include "chattox/error.hpp"

namespace chattox::cli {

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t seconds = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool_version"] = m.tool_version;
  j["config_digest"] = m.config_digest;
  j["corpus_digest"] = m.corpus_digest;
  nlohmann::ordered_json stages = nlohmann::ordered_json::object();
  for (const auto& [name, s] : m.stages) {
    stages[name] = {{"started_at", s.started_at}, {"finished_at", s.finished_at},
                    {"counts", s.counts}};
  }
  j["stages"] = stages;
  return j;
}

RunManifest load_run_manifest(const std::filesystem::path& path) {
  RunManifest m;
  std::ifstream in(path);
  if (!in) return m;
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
    m.tool_version = j.value("tool_version", std::string(kToolVersion));
    m.config_digest = j.value("config_digest", std::string());
    m.corpus_digest = j.value("corpus_digest", std::string());
    if (j.contains("stages")) {
      for (const auto& [name, s] : j["stages"].items()) {
        StageRecord r;
        r.started_at = s.value("started_at", std::string());
        r.finished_at = s.value("finished_at", std::string());
        if (s.contains("counts")) r.counts = s["counts"];
        m.stages[name] = std::move(r);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDump, path.string() + ": " + e.what());
  }
  return m;
}

void save_run_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileNotReadable, "cannot write " + tmp);
    out << to_json(manifest).dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace chattox::cli
