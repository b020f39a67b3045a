#include "chattox/label_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "chattox/error.hpp"

namespace chattox {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(LabelStatus status) {
  switch (status) {
    case LabelStatus::PreNonToxic: return "pre_non_toxic";
    case LabelStatus::Bot: return "bot";
    case LabelStatus::NonToxic: return "non_toxic";
    case LabelStatus::Toxic: return "toxic";
    case LabelStatus::Invalid: return "invalid";
  }
  return "";
}

std::optional<LabelStatus> parse_status(std::string_view text) {
  for (LabelStatus s : kAllStatuses) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

bool ToxicityLabel::valid() const {
  if (status != LabelStatus::Toxic && (primary || secondary)) return false;
  if (secondary && !primary) return false;
  if (primary && secondary && *primary == *secondary) return false;
  return !message_id.empty();
}

std::string serialize_label(const ToxicityLabel& label) {
  ordered_json j;
  j["message_id"] = label.message_id;
  j["status"] = to_string(label.status);
  j["primary"] =
      label.primary ? ordered_json(canonical_string(*label.primary)) : ordered_json(nullptr);
  j["secondary"] =
      label.secondary ? ordered_json(canonical_string(*label.secondary)) : ordered_json(nullptr);
  j["backend_id"] = label.backend_id;
  j["response_digest"] = label.response_digest;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

ToxicityLabel deserialize_label(std::string_view line) {
  const json j = json::parse(line.begin(), line.end());
  ToxicityLabel label;
  label.message_id = j.at("message_id").get<std::string>();
  auto status = parse_status(j.at("status").get<std::string>());
  if (!status) throw std::invalid_argument("unknown status");
  label.status = *status;
  auto subclass_field = [&](const char* key) -> std::optional<Subclass> {
    const json& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    auto s = parse_subclass(v.get<std::string>());
    if (!s) throw std::invalid_argument(std::string("unknown subclass in ") + key);
    return s;
  };
  label.primary = subclass_field("primary");
  label.secondary = subclass_field("secondary");
  label.backend_id = j.at("backend_id").get<std::string>();
  label.response_digest = j.at("response_digest").get<std::string>();
  if (!label.valid()) throw std::invalid_argument("label violates status/subclass invariants");
  return label;
}

namespace {

struct Replayed {
  std::vector<ToxicityLabel> records;
  std::size_t good_bytes = 0;
  std::size_t total_bytes = 0;
};

Replayed replay(const std::filesystem::path& path) {
  Replayed out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  out.total_bytes = data.size();

  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail
    ++lineno;
    std::string_view line(data.data() + pos, nl - pos);
    if (!line.empty()) {
      try {
        out.records.push_back(deserialize_label(line));
      } catch (const std::exception& e) {
        throw Error(ErrorCode::StoreCorrupt,
                    path.string() + " line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    pos = nl + 1;
  }
  out.good_bytes = pos;
  return out;
}

}  // namespace

LabelStore::LabelStore(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  Replayed r = replay(path_);
  for (auto& rec : r.records) {
    if (index_.contains(rec.message_id)) {
      throw Error(ErrorCode::StoreCorrupt,
                  path_.string() + ": duplicate record for " + rec.message_id);
    }
    index_.emplace(rec.message_id, records_.size());
    records_.push_back(std::move(rec));
  }
  if (r.good_bytes < r.total_bytes) {
    recovered_tail_bytes_ = r.total_bytes - r.good_bytes;
    std::filesystem::resize_file(path_, r.good_bytes);
  }
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_) throw Error(ErrorCode::FileNotReadable, "cannot open store " + path_.string());
}

LabelStore::~LabelStore() {
  if (file_) {
    std::fflush(file_);
    ::fsync(::fileno(file_));
    std::fclose(file_);
  }
}

bool LabelStore::append(const ToxicityLabel& label) {
  if (!label.valid()) {
    throw Error(ErrorCode::InvalidArgument, "refusing invalid label for " + label.message_id);
  }
  std::lock_guard lock(mu_);
  if (index_.contains(label.message_id)) return false;
  const std::string line = serialize_label(label) + "\n";
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
      std::fflush(file_) != 0) {
    throw Error(ErrorCode::StoreCorrupt, "write failed on " + path_.string());
  }
  index_.emplace(label.message_id, records_.size());
  records_.push_back(label);
  return true;
}

bool LabelStore::contains(const std::string& message_id) const {
  std::lock_guard lock(mu_);
  return index_.contains(message_id);
}

std::optional<ToxicityLabel> LabelStore::find(const std::string& message_id) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(message_id);
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

std::size_t LabelStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::vector<ToxicityLabel> LabelStore::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

void LabelStore::sync() {
  std::lock_guard lock(mu_);
  std::fflush(file_);
  ::fsync(::fileno(file_));
}

std::vector<ToxicityLabel> read_label_store(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::StageMissingInput, "no label store at " + path.string());
  }
  return replay(path).records;
}

}  // namespace chattox
