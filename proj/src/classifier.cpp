#include "chattox/classifier.hpp"

#include <atomic>
#include <condition_variable>
#include <exception>
#include <optional>
#include <thread>
#include <variant>

#include "chattox/digest.hpp"

namespace chattox {

double ClassificationSummary::invalid_rate() const {
  return total_messages == 0 ? 0.0
                             : static_cast<double>(count(LabelStatus::Invalid)) /
                                   static_cast<double>(total_messages);
}

double ClassificationSummary::toxic_rate() const {
  return total_messages == 0 ? 0.0
                             : static_cast<double>(count(LabelStatus::Toxic)) /
                                   static_cast<double>(total_messages);
}

std::size_t record_prelabels(const Corpus& corpus, const PreLabelAssignment& assignment,
                             LabelStore& store) {
  std::size_t written = 0;
  for (std::size_t s = 0; s < corpus.streams.size(); ++s) {
    const auto& msgs = corpus.streams[s].messages;
    for (std::size_t i = 0; i < msgs.size(); ++i) {
      const PreLabel p = assignment.at(s, i);
      if (p == PreLabel::NeedsClassification) continue;
      ToxicityLabel label;
      label.message_id = msgs[i].message_id;
      label.status =
          p == PreLabel::BotMessage ? LabelStatus::Bot : LabelStatus::PreNonToxic;
      label.backend_id = "prelabel";
      if (store.append(label)) ++written;
    }
  }
  return written;
}

ToxicityLabel label_from_responses(const std::string& message_id, const std::string& backend_id,
                                   const std::string& stage1, const std::string* stage2) {
  ToxicityLabel label;
  label.message_id = message_id;
  label.backend_id = backend_id;
  std::string digest_input = stage1;
  const BinaryVerdict verdict = parse_binary_response(stage1);
  if (verdict == BinaryVerdict::NonToxic) {
    label.status = LabelStatus::NonToxic;
  } else if (verdict == BinaryVerdict::Invalid || stage2 == nullptr) {
    label.status = LabelStatus::Invalid;
  } else {
    digest_input += '\x1f';
    digest_input += *stage2;
    if (auto sub = parse_subclass_response(*stage2)) {
      label.status = LabelStatus::Toxic;
      label.primary = sub->primary;
      label.secondary = sub->secondary;
    } else {
      label.status = LabelStatus::Invalid;
    }
  }
  label.response_digest = short_digest(digest_input, 16);
  return label;
}

namespace {

struct WorkItem {
  std::size_t stream;
  std::size_t index;
};

struct Outcome {
  ToxicityLabel label;
  bool stage2_sent = false;
  bool stage1_invalid = false;
  bool stage2_invalid = false;
};

using Slot = std::variant<std::monostate, Outcome, std::exception_ptr>;

}  // namespace

ClassificationSummary classify_corpus(const Corpus& corpus, const PreLabelAssignment& assignment,
                                      Backend& backend, LabelStore& store,
                                      const ClassifyConfig& config) {
  ClassificationSummary summary;
  record_prelabels(corpus, assignment, store);

  std::vector<WorkItem> work;
  for (std::size_t s = 0; s < corpus.streams.size(); ++s) {
    const auto& msgs = corpus.streams[s].messages;
    for (std::size_t i = 0; i < msgs.size(); ++i) {
      if (assignment.at(s, i) != PreLabel::NeedsClassification) continue;
      if (store.contains(msgs[i].message_id)) {
        ++summary.already_labeled;
        continue;
      }
      work.push_back({s, i});
    }
  }

  const std::string backend_id = backend.id();
  auto classify_one = [&](const WorkItem& item) {
    const auto& msgs = corpus.streams[item.stream].messages;
    const ChatMessage& target = msgs[item.index];
    const Context ctx = build_context(msgs, item.index, config.window_s, config.context_cap);
    Outcome out;
    const std::string r1 =
        send_with_retry(backend, render_prompt(target, ctx, PromptStage::Binary), config.retry);
    std::optional<std::string> r2;
    if (parse_binary_response(r1) == BinaryVerdict::Toxic) {
      r2 = send_with_retry(backend, render_prompt(target, ctx, PromptStage::Subclass),
                           config.retry);
      out.stage2_sent = true;
      out.stage2_invalid = !parse_subclass_response(*r2).has_value();
    } else {
      out.stage1_invalid = parse_binary_response(r1) == BinaryVerdict::Invalid;
    }
    out.label = label_from_responses(target.message_id, backend_id, r1, r2 ? &*r2 : nullptr);
    return out;
  };

  const std::size_t n = work.size();
  std::vector<Slot> slots(n);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::size_t finished_workers = 0;
  const std::size_t worker_count = std::max<std::size_t>(1, std::min(config.max_in_flight, n));

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      Slot result;
      try {
        result = classify_one(work[i]);
      } catch (...) {
        result = std::current_exception();
        abort.store(true);
      }
      {
        std::lock_guard lock(mu);
        slots[i] = std::move(result);
      }
      cv.notify_all();
    }
    {
      std::lock_guard lock(mu);
      ++finished_workers;
    }
    cv.notify_all();
  };

  std::exception_ptr failure;
  {
    std::vector<std::jthread> workers;
    if (n > 0) {
      workers.reserve(worker_count);
      for (std::size_t w = 0; w < worker_count; ++w) workers.emplace_back(worker);
    }

    // In-order committer.
    for (std::size_t i = 0; i < n; ++i) {
      Slot slot;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] {
          return !std::holds_alternative<std::monostate>(slots[i]) ||
                 finished_workers == worker_count;
        });
        slot = std::move(slots[i]);
      }
      if (std::holds_alternative<std::monostate>(slot)) break;
      if (auto* err = std::get_if<std::exception_ptr>(&slot)) {
        failure = *err;
        break;
      }
      const Outcome& out = std::get<Outcome>(slot);
      ++summary.stage1_requests;
      if (out.stage2_sent) ++summary.stage2_requests;
      if (out.stage1_invalid) ++summary.stage1_invalid;
      if (out.stage2_invalid) ++summary.stage2_invalid;
      if (store.append(out.label)) ++summary.newly_labeled;
    }
    abort.store(true);
  }
  store.sync();

  if (!failure) {
    // A worker may have failed on an item the committer never reached.
    for (auto& slot : slots) {
      if (auto* err = std::get_if<std::exception_ptr>(&slot)) {
        failure = *err;
        break;
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  summary.total_messages = corpus.message_count();
  for (const auto& stream : corpus.streams) {
    for (const auto& m : stream.messages) {
      if (auto label = store.find(m.message_id)) {
        ++summary.status_counts[static_cast<std::size_t>(label->status)];
      }
    }
  }
  return summary;
}

}  // namespace chattox
