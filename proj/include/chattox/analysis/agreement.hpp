#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chattox/analysis/view.hpp"
#include "chattox/context.hpp"

namespace chattox::analysis {

struct SampleRow {
  std::string sample_id;
  std::string message_id;
  std::string context;  // "user: text" lines joined with " | "
  std::string text;
  bool toxic = false;
  std::optional<Subclass> primary;
  std::optional<Subclass> secondary;
};

struct SampleBundle {
  std::vector<SampleRow> rows;
  std::uint64_t seed = 0;
};

/// Stratified uniform sample of model-labeled Toxic and NonToxic messages
/// with their preceding-window context. Rows are shuffled so the classes
/// are interleaved. Error(InsufficientClass) if either class is too small.
SampleBundle agreement_sample(const LabeledCorpusView& view, std::size_t n_toxic,
                              std::size_t n_nontoxic, std::uint64_t seed,
                              double window_s = kDefaultWindowSeconds,
                              std::size_t cap = kDefaultContextCap);

/// Tab-separated, header "sample_id context text label subclass", labels blank.
void write_rater_file(const SampleBundle& bundle, const std::filesystem::path& path);
/// Tab-separated, header "sample_id message_id label primary secondary".
void write_answer_key(const SampleBundle& bundle, const std::filesystem::path& path);

struct KeyRow {
  std::string sample_id;
  bool toxic = false;
  std::optional<Subclass> primary;
};

struct RaterRow {
  std::string sample_id;
  bool toxic = false;
  std::optional<Subclass> subclass;
};

struct RaterSheet {
  std::string rater;
  std::vector<RaterRow> rows;
};

std::vector<KeyRow> read_answer_key(const std::filesystem::path& path);
RaterSheet read_rater_file(const std::filesystem::path& path);

struct RaterKappa {
  std::string rater;
  std::optional<double> kappa;  // nullopt when undefined (degenerate agreement)
  std::size_t items = 0;
};

struct PairKappa {
  std::string rater_a;
  std::string rater_b;
  std::optional<double> kappa;
  std::size_t items = 0;
};

/// Model said `model_label`, a rater said `human_label`.
struct ConfusionPair {
  std::string model_label;
  std::string human_label;
  std::size_t count = 0;
  double share = 0.0;  // of all model/human subclass disagreements
};

struct AgreementReport {
  std::vector<RaterKappa> model_vs_human;
  std::optional<double> mean_model_vs_human;
  std::vector<PairKappa> inter_human;
  std::optional<double> mean_inter_human;

  std::vector<RaterKappa> subclass_model_vs_human;
  std::optional<double> mean_subclass_model_vs_human;
  std::vector<PairKappa> subclass_inter_human;
  std::optional<double> mean_subclass_inter_human;
  std::vector<ConfusionPair> subclass_disagreements;  // most frequent first
};

/// Error(RowMismatch) unless every sheet covers exactly the key's sample ids.
AgreementReport agreement_score(std::span<const KeyRow> key, std::span<const RaterSheet> raters);

/// Arithmetic mean of the defined values; nullopt when none are defined.
std::optional<double> mean_of(std::span<const std::optional<double>> values);

}  // namespace chattox::analysis
