#include "chattox/backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>

namespace chattox {

using nlohmann::json;

std::chrono::milliseconds RetryPolicy::backoff(std::size_t attempt) const {
  const double scale = std::pow(multiplier, static_cast<double>(attempt));
  return std::chrono::milliseconds(
      static_cast<long long>(static_cast<double>(initial_backoff.count()) * scale));
}

std::string send_with_retry(Backend& backend, const PromptPayload& payload,
                            const RetryPolicy& policy) {
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      return backend.send(payload);
    } catch (const BackendError& e) {
      if (attempt >= policy.max_retries) {
        throw Error(ErrorCode::BackendUnavailable,
                    backend.id() + " failed after " + std::to_string(attempt + 1) +
                        " attempts: " + e.what());
      }
      const auto delay = policy.backoff(attempt);
      if (policy.sleep) {
        policy.sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
    }
  }
}

void CaptureLog::record(const std::string& digest, const std::string& response) {
  std::lock_guard lock(mu_);
  entries_.insert_or_assign(digest, response);
}

const std::string* CaptureLog::find(const std::string& digest) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(digest);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t CaptureLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

void CaptureLog::save(const std::filesystem::path& path) const {
  std::lock_guard lock(mu_);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotReadable, "cannot write " + path.string());
  for (const auto& [digest, response] : entries_) {
    json j = {{"payload_digest", digest}, {"raw_response", response}};
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

CaptureLog CaptureLog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  CaptureLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      log.entries_.insert_or_assign(j.at("payload_digest").get<std::string>(),
                                    j.at("raw_response").get<std::string>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedDump,
                  path.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

MockBackend::MockBackend(Responder responder, std::string id)
    : responder_(std::move(responder)), id_(std::move(id)) {}

std::unique_ptr<MockBackend> MockBackend::scripted(std::map<std::string, std::string> by_digest) {
  return std::make_unique<MockBackend>(
      [table = std::move(by_digest)](const PromptPayload& p) -> std::string {
        auto it = table.find(p.digest());
        if (it == table.end()) throw BackendError(BackendFailure::HttpError, "unscripted payload");
        return it->second;
      });
}

std::string MockBackend::send(const PromptPayload& payload) {
  {
    std::lock_guard lock(mu_);
    requests_.push_back(payload);
  }
  std::string response = responder_(payload);
  capture_.record(payload.digest(), response);
  return response;
}

std::vector<PromptPayload> MockBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t MockBackend::request_count() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

std::unique_ptr<ReplayBackend> ReplayBackend::from_file(const std::filesystem::path& path) {
  return std::make_unique<ReplayBackend>(CaptureLog::load(path));
}

std::string ReplayBackend::send(const PromptPayload& payload) {
  {
    std::lock_guard lock(mu_);
    ++requests_;
  }
  const std::string digest = payload.digest();
  if (const std::string* hit = log_.find(digest)) return *hit;
  throw Error(ErrorCode::ReplayMiss, "no recorded response for payload " + digest);
}

std::size_t ReplayBackend::request_count() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::string RecordingBackend::send(const PromptPayload& payload) {
  std::string response = inner_.send(payload);
  capture_.record(payload.digest(), response);
  return response;
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  std::vector<ScriptRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    try {
      json j = json::parse(line);
      ScriptRule r;
      r.contains = j.at("contains").get<std::string>();
      r.binary = j.value("binary", std::string("yes"));
      r.subclass = j.value("subclass", std::string());
      rules.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigInvalid,
                  path.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return std::make_unique<ScriptedBackend>(std::move(rules));
}

std::string ScriptedBackend::send(const PromptPayload& payload) {
  static constexpr std::string_view kTargetHeader = "\nTarget message:\n";
  const auto pos = payload.user_content.rfind(kTargetHeader);
  std::string target = pos == std::string::npos
                           ? payload.user_content
                           : payload.user_content.substr(pos + kTargetHeader.size());
  const auto colon = target.find(": ");
  if (colon != std::string::npos) target = target.substr(colon + 2);
  std::transform(target.begin(), target.end(), target.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  for (const auto& rule : rules_) {
    std::string needle = rule.contains;
    std::transform(needle.begin(), needle.end(), needle.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (target.find(needle) == std::string::npos) continue;
    return payload.stage == PromptStage::Binary ? rule.binary : rule.subclass;
  }
  return payload.stage == PromptStage::Binary ? "no" : "none";
}

}  // namespace chattox
