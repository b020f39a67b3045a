#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "chattox/error.hpp"
#include "chattox/prompt.hpp"

namespace chattox {

enum class BackendFailure { Timeout, HttpError, QuotaExceeded };

/// Transient failure reported by a backend; retried by send_with_retry.
class BackendError : public std::runtime_error {
 public:
  BackendError(BackendFailure kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  BackendFailure kind() const noexcept { return kind_; }

 private:
  BackendFailure kind_;
};

/// A chat-completion service that turns a prompt into raw text.
/// Implementations must be safe to call from several threads at once.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string send(const PromptPayload& payload) = 0;
  virtual std::string id() const = 0;
};

struct RetryPolicy {
  std::size_t max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  /// Replaceable so tests do not sleep.
  std::function<void(std::chrono::milliseconds)> sleep;

  std::chrono::milliseconds backoff(std::size_t attempt) const;
};

/// Retries BackendError with exponential backoff, then throws
/// Error(BackendUnavailable). Other exceptions propagate untouched.
std::string send_with_retry(Backend& backend, const PromptPayload& payload,
                            const RetryPolicy& policy);

/// payload digest -> raw response, persisted as JSON lines.
class CaptureLog {
 public:
  CaptureLog() = default;
  CaptureLog(CaptureLog&& other) noexcept : entries_(other.take()) {}
  CaptureLog& operator=(CaptureLog&& other) noexcept {
    if (this != &other) {
      auto moved = other.take();
      std::lock_guard lock(mu_);
      entries_ = std::move(moved);
    }
    return *this;
  }

  void record(const std::string& digest, const std::string& response);
  const std::string* find(const std::string& digest) const;
  std::size_t size() const;

  void save(const std::filesystem::path& path) const;
  static CaptureLog load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string> take() {
    std::lock_guard lock(mu_);
    return std::move(entries_);
  }

  mutable std::mutex mu_;
  std::map<std::string, std::string> entries_;
};

/// In-process backend driven by a responder function; records every request.
class MockBackend : public Backend {
 public:
  using Responder = std::function<std::string(const PromptPayload&)>;

  explicit MockBackend(Responder responder, std::string id = "mock");
  /// Scripted by payload digest; unscripted digests throw HttpError.
  static std::unique_ptr<MockBackend> scripted(std::map<std::string, std::string> by_digest);

  std::string send(const PromptPayload& payload) override;
  std::string id() const override { return id_; }

  std::vector<PromptPayload> requests() const;
  std::size_t request_count() const;
  const CaptureLog& capture() const { return capture_; }

 private:
  Responder responder_;
  std::string id_;
  mutable std::mutex mu_;
  std::vector<PromptPayload> requests_;
  CaptureLog capture_;
};

/// Answers from a recorded capture log; a missing digest is Error(ReplayMiss).
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(CaptureLog log) : log_(std::move(log)) {}
  static std::unique_ptr<ReplayBackend> from_file(const std::filesystem::path& path);

  std::string send(const PromptPayload& payload) override;
  std::string id() const override { return "replay"; }
  std::size_t request_count() const;

 private:
  CaptureLog log_;
  mutable std::mutex mu_;
  std::size_t requests_ = 0;
};

/// Forwards to another backend and records every successful exchange.
class RecordingBackend : public Backend {
 public:
  explicit RecordingBackend(Backend& inner) : inner_(inner) {}

  std::string send(const PromptPayload& payload) override;
  std::string id() const override { return inner_.id(); }
  const CaptureLog& capture() const { return capture_; }

 private:
  Backend& inner_;
  CaptureLog capture_;
};

/// Keyword-scripted stand-in model for dry runs: the first rule whose
/// `contains` substring (case-insensitive) occurs in the target message decides.
struct ScriptRule {
  std::string contains;
  std::string binary = "yes";
  std::string subclass;
};

class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {}
  /// JSON lines: {"contains": "...", "binary": "yes", "subclass": "bullying, profanity"}.
  static std::unique_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

  std::string send(const PromptPayload& payload) override;
  std::string id() const override { return "scripted"; }

 private:
  std::vector<ScriptRule> rules_;
};

struct HttpBackendConfig {
  std::string url;  // e.g. http://localhost:8000/v1/chat/completions
  std::string model;
  std::string api_key;
  double timeout_s = 60.0;
  double temperature = 0.0;
};

/// Chat-completion-style HTTP client: POST {model, messages, temperature},
/// reads choices[0].message.content.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string send(const PromptPayload& payload) override;
  std::string id() const override { return "http:" + config_.model; }

  /// Request body as sent on the wire.
  std::string request_body(const PromptPayload& payload) const;

 private:
  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

}  // namespace chattox
