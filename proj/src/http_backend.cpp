#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <nlohmann/json.hpp>

#include "chattox/backend.hpp"

namespace chattox {

using nlohmann::json;

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ConfigInvalid, "backend url needs a scheme: " + config_.url);
  }
  const auto path_start = config_.url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = config_.url;
    path_ = "/v1/chat/completions";
  } else {
    scheme_host_port_ = config_.url.substr(0, path_start);
    path_ = config_.url.substr(path_start);
  }
}

std::string HttpBackend::request_body(const PromptPayload& payload) const {
  json body;
  body["model"] = config_.model;
  body["messages"] = json::array({
      {{"role", "system"}, {"content", payload.system_instruction}},
      {{"role", "user"}, {"content", payload.user_content}},
  });
  body["temperature"] = config_.temperature;
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string HttpBackend::send(const PromptPayload& payload) {
  // One client per call keeps send() thread-safe without sharing sockets.
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_s);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  auto res = client.Post(path_, headers, request_body(payload), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto kind = (err == httplib::Error::Read || err == httplib::Error::Write ||
                       err == httplib::Error::ConnectionTimeout)
                          ? BackendFailure::Timeout
                          : BackendFailure::HttpError;
    throw BackendError(kind, "request to " + config_.url + " failed: " + httplib::to_string(err));
  }
  if (res->status == 429) {
    throw BackendError(BackendFailure::QuotaExceeded, "rate limited by " + config_.url);
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError(BackendFailure::HttpError,
                       "HTTP " + std::to_string(res->status) + " from " + config_.url);
  }
  try {
    const json doc = json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(BackendFailure::HttpError,
                       "unexpected completion body from " + config_.url + ": " + e.what());
  }
}

}  // namespace chattox
