#pragma once

#include <array>
#include <cstddef>

#include "chattox/backend.hpp"
#include "chattox/context.hpp"
#include "chattox/ingest.hpp"
#include "chattox/label_store.hpp"
#include "chattox/prelabel.hpp"

namespace chattox {

struct ClassifyConfig {
  double window_s = kDefaultWindowSeconds;
  std::size_t context_cap = kDefaultContextCap;
  std::size_t max_in_flight = 1;
  RetryPolicy retry;
};

struct ClassificationSummary {
  std::array<std::size_t, 5> status_counts{};  // indexed by LabelStatus, whole corpus
  std::size_t total_messages = 0;
  std::size_t stage1_requests = 0;
  std::size_t stage2_requests = 0;
  std::size_t already_labeled = 0;  // skipped because the store had them
  std::size_t newly_labeled = 0;
  std::size_t stage1_invalid = 0;  // this run
  std::size_t stage2_invalid = 0;  // this run

  std::size_t count(LabelStatus s) const { return status_counts[static_cast<std::size_t>(s)]; }
  double invalid_rate() const;
  double toxic_rate() const;
};

/// Stores the PreNonToxic/Bot verdicts that are not in the store yet.
/// Returns the number of records written.
std::size_t record_prelabels(const Corpus& corpus, const PreLabelAssignment& assignment,
                             LabelStore& store);

/// Runs both stages on the unlabeled NeedsClassification messages.
///
/// Requests run on up to max_in_flight threads but labels are committed in
/// corpus order, so the store's bytes do not depend on completion order or on
/// where an earlier run was interrupted. On failure every label finished
/// before the failing message is committed and the error is rethrown.
ClassificationSummary classify_corpus(const Corpus& corpus, const PreLabelAssignment& assignment,
                                      Backend& backend, LabelStore& store,
                                      const ClassifyConfig& config);

/// Label for one message from its stage responses (r2 empty when stage 2 was skipped).
ToxicityLabel label_from_responses(const std::string& message_id, const std::string& backend_id,
                                   const std::string& stage1, const std::string* stage2);

}  // namespace chattox
