#include "chattox/cli/app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>

#include "chattox/analysis/report.hpp"
#include "chattox/classifier.hpp"
#include "chattox/cli/config.hpp"
#include "chattox/cli/manifest.hpp"
#include "chattox/digest.hpp"
#include "chattox/prelabel.hpp"

namespace chattox::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidArgument:
      return 2;
    case ErrorCode::StageMissingInput:
    case ErrorCode::FileNotReadable:
      return 3;
    case ErrorCode::BackendUnavailable:
    case ErrorCode::ReplayMiss:
      return 4;
    default:
      return 5;
  }
}

namespace {

using analysis::Json;
namespace fs = std::filesystem;

void emit_error(std::ostream& err, std::string_view code, const std::string& message, int exit) {
  Json j;
  j["error"] = std::string(code);
  j["message"] = message;
  j["exit_code"] = exit;
  err << j.dump() << '\n';
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotReadable, "cannot write " + path.string());
  out << content;
}

void write_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

class Session {
 public:
  Session(const fs::path& config_path, std::ostream& out)
      : config_(load_config(config_path)), out_(out), started_(std::chrono::system_clock::now()) {}

  const RunConfig& config() const { return config_; }
  std::ostream& out() { return out_; }
  fs::path report(const std::string& name) const { return config_.paths.reports / name; }

  bool has_corpus() const { return fs::exists(config_.paths.corpus / "messages.jsonl"); }

  Corpus corpus() {
    if (!has_corpus()) {
      throw Error(ErrorCode::StageMissingInput,
                  "no corpus at " + config_.paths.corpus.string() + "; run ingest first");
    }
    return read_corpus(config_.paths.corpus);
  }

  std::string corpus_digest() const {
    return has_corpus() ? chattox::corpus_digest(config_.paths.corpus) : std::string();
  }

  std::vector<ToxicityLabel> labels() const {
    if (!fs::exists(config_.paths.store)) {
      throw Error(ErrorCode::StageMissingInput,
                  "no label store at " + config_.paths.store.string() + "; run classify first");
    }
    return read_label_store(config_.paths.store);
  }

  PreLabelRuleSet rules() const {
    PreLabelRuleSet rules = PreLabelRuleSet::defaults();
    if (!config_.prelabel.allowlist_path.empty()) {
      rules.allowlist.clear();
      for (const auto& entry : read_rule_file(config_.prelabel.allowlist_path)) {
        rules.allowlist.insert(fold_message(entry));
      }
    }
    if (config_.prelabel.bots) {
      rules.bot_users = {config_.prelabel.bots->begin(), config_.prelabel.bots->end()};
    }
    return rules;
  }

  std::unique_ptr<Backend> backend() const {
    const BackendConfig& b = config_.backend;
    switch (b.kind) {
      case BackendKind::Replay:
        return ReplayBackend::from_file(b.replay_log);
      case BackendKind::Scripted:
        return ScriptedBackend::from_file(b.script);
      case BackendKind::Http:
        break;
    }
    HttpBackendConfig h;
    h.url = b.url;
    h.model = b.model;
    h.api_key = b.api_key;
    h.timeout_s = b.timeout_s;
    h.temperature = config_.classify.temperature;
    return std::make_unique<HttpBackend>(h);
  }

  RetryPolicy retry() const {
    RetryPolicy r;
    r.max_retries = config_.backend.max_retries;
    r.initial_backoff = std::chrono::milliseconds(config_.backend.backoff_ms);
    return r;
  }

  /// Digests that tie a report to its manifest.
  Json provenance(const std::string& corpus_digest) const {
    Json j;
    j["manifest"] = kManifestFile;
    j["tool_version"] = kToolVersion;
    j["config_digest"] = config_.digest;
    j["corpus_digest"] = corpus_digest;
    return j;
  }

  void record_stage(const std::string& stage, const std::string& corpus_digest, Json counts) {
    const fs::path path = report(kManifestFile);
    RunManifest m = load_run_manifest(path);
    m.tool_version = kToolVersion;
    m.config_digest = config_.digest;
    if (!corpus_digest.empty()) m.corpus_digest = corpus_digest;
    StageRecord& r = m.stages[stage];
    r.started_at = utc_timestamp(started_);
    r.finished_at = utc_timestamp(std::chrono::system_clock::now());
    r.counts = std::move(counts);
    save_run_manifest(m, path);
  }

 private:
  RunConfig config_;
  std::ostream& out_;
  std::chrono::system_clock::time_point started_;
};

analysis::PairwiseConfig pairwise_config(const RunConfig& c) {
  analysis::PairwiseConfig p;
  p.n_permutations = c.stats.n_perm;
  p.seed = c.stats.seed;
  p.alpha = c.stats.alpha;
  p.metric = c.stats.metric;
  p.threads = c.stats.threads;
  return p;
}

/// Analyses that can legitimately fail on a given corpus are reported inline.
template <typename F>
Json attempt(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::DegenerateSplit:
      case ErrorCode::UnitTooSmall:
      case ErrorCode::GroupTooSmall:
      case ErrorCode::DegenerateInput:
        return Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
      default:
        throw;
    }
  }
}

void cmd_ingest(Session& s, const fs::path& manifest, bool strict) {
  ParseOptions options;
  options.strict = strict;
  const Corpus corpus = load_corpus(manifest, options);
  write_corpus(corpus, s.config().paths.corpus);
  const auto digest = s.corpus_digest();
  const auto summary = corpus.summary();
  Json counts;
  counts["streams"] = summary.streams;
  counts["messages"] = summary.messages;
  counts["hours"] = analysis::number(summary.hours);
  counts["skipped_comments"] = summary.skipped_comments;
  Json report;
  report["provenance"] = s.provenance(digest);
  report["summary"] = counts;
  write_json(s.report("ingest.json"), report);
  s.record_stage("ingest", digest, counts);
  s.out() << summary.streams << " streams, " << summary.messages << " messages, "
          << summary.skipped_comments << " comments skipped\n";
}

void cmd_prelabel(Session& s, std::size_t top) {
  const Corpus corpus = s.corpus();
  const auto digest = s.corpus_digest();
  const auto assignment = apply_prelabels(corpus, s.rules());
  LabelStore store(s.config().paths.store);
  const std::size_t written = record_prelabels(corpus, assignment, store);
  store.sync();

  Json counts;
  counts["messages"] = assignment.total();
  counts["allowlisted"] = assignment.allowlisted;
  counts["bots"] = assignment.bots;
  counts["needs_classification"] = assignment.needs_classification;
  counts["records_written"] = written;
  Json frequent = Json::array();
  for (const auto& [text, n] : top_frequent_messages(corpus, top)) {
    frequent.push_back({{"text", text}, {"count", n}});
  }
  Json report;
  report["provenance"] = s.provenance(digest);
  report["counts"] = counts;
  report["top_frequent_messages"] = frequent;
  write_json(s.report("prelabel.json"), report);
  s.record_stage("prelabel", digest, counts);
  s.out() << assignment.allowlisted << " allowlisted, " << assignment.bots << " bot, "
          << assignment.needs_classification << " to classify\n";
}

void cmd_classify(Session& s) {
  const Corpus corpus = s.corpus();
  const auto digest = s.corpus_digest();
  const auto assignment = apply_prelabels(corpus, s.rules());
  auto backend = s.backend();
  std::unique_ptr<RecordingBackend> recorder;
  Backend* active = backend.get();
  if (!s.config().backend.record_log.empty()) {
    recorder = std::make_unique<RecordingBackend>(*backend);
    active = recorder.get();
  }
  ClassifyConfig cfg;
  cfg.window_s = s.config().classify.window_s;
  cfg.context_cap = s.config().classify.context_cap;
  cfg.max_in_flight = s.config().backend.max_in_flight;
  cfg.retry = s.retry();

  LabelStore store(s.config().paths.store);
  ClassificationSummary summary;
  try {
    summary = classify_corpus(corpus, assignment, *active, store, cfg);
  } catch (...) {
    if (recorder) recorder->capture().save(s.config().backend.record_log);
    throw;
  }
  if (recorder) recorder->capture().save(s.config().backend.record_log);

  Json body = analysis::to_json(summary);
  Json report;
  report["provenance"] = s.provenance(digest);
  report["backend"] = backend->id();
  report["summary"] = body;
  write_json(s.report("classify.json"), report);
  s.record_stage("classify", digest, body);
  s.out() << summary.newly_labeled << " newly labeled, " << summary.already_labeled
          << " already labeled, " << summary.stage1_requests << " stage-1 and "
          << summary.stage2_requests << " stage-2 requests\n";
}

Json analysis_json(const analysis::LabeledCorpusView& view, analysis::GroupBy by,
                   const RunConfig& config) {
  using analysis::LabelLevel;
  using analysis::LabelSlot;
  Json j;
  j["group_by"] = std::string(to_string(by));
  j["alpha"] = config.stats.alpha;
  j["toxicity_ratio"] = analysis::to_json(analysis::toxicity_ratio(view, by));
  Json prevalence;
  for (auto level : {LabelLevel::Category, LabelLevel::Subclass}) {
    Json per_slot;
    for (auto slot : {LabelSlot::Primary, LabelSlot::Secondary, LabelSlot::Combined}) {
      per_slot[std::string(to_string(slot))] =
          analysis::to_json(analysis::label_prevalence(view, level, slot, by));
    }
    prevalence[std::string(to_string(level))] = per_slot;
  }
  j["label_prevalence"] = prevalence;
  const auto sub = analysis::cooccurrence(view, LabelLevel::Subclass);
  j["cooccurrence"] = {{"subclass", analysis::to_json(sub)},
                       {"category", analysis::to_json(analysis::aggregate_to_categories(sub))}};
  j["high_low"] = attempt([&] {
    return analysis::to_json(analysis::high_low_comparison(view, config.stats.alpha));
  });
  if (by == analysis::GroupBy::Game || by == analysis::GroupBy::Genre) {
    j["pairwise"] = attempt([&] {
      return analysis::to_json(
          analysis::pairwise_distribution_tests(view, by, pairwise_config(config)));
    });
  }
  return j;
}

void cmd_analyze(Session& s, analysis::GroupBy by) {
  const auto labels = s.labels();
  const Corpus corpus = s.corpus();
  const auto digest = s.corpus_digest();
  const analysis::LabeledCorpusView view(corpus, labels);
  Json report;
  report["provenance"] = s.provenance(digest);
  report["analysis"] = analysis_json(view, by, s.config());
  const std::string name = "analysis_" + std::string(to_string(by)) + ".json";
  write_json(s.report(name), report);
  s.record_stage("analyze_" + std::string(to_string(by)), digest,
                 Json{{"messages", view.messages().size()}, {"report", name}});
  s.out() << "wrote " << name << '\n';
}

void cmd_agreement_sample(Session& s, std::size_t n_toxic, std::size_t n_nontoxic,
                          std::optional<std::uint64_t> seed, const fs::path& out_dir) {
  const auto labels = s.labels();
  const Corpus corpus = s.corpus();
  const auto digest = s.corpus_digest();
  const analysis::LabeledCorpusView view(corpus, labels);
  const std::uint64_t used_seed = seed.value_or(s.config().stats.seed);
  const auto bundle = analysis::agreement_sample(view, n_toxic, n_nontoxic, used_seed,
                                                 s.config().classify.window_s,
                                                 s.config().classify.context_cap);
  const fs::path dir = out_dir.empty() ? s.report("agreement") : out_dir;
  fs::create_directories(dir);
  analysis::write_rater_file(bundle, dir / "rater_sheet.tsv");
  analysis::write_answer_key(bundle, dir / "answer_key.tsv");
  s.record_stage("agreement_sample", digest,
                 Json{{"toxic", n_toxic}, {"nontoxic", n_nontoxic}, {"seed", used_seed}});
  s.out() << "wrote " << bundle.rows.size() << " rows to " << dir.string() << '\n';
}

void cmd_agreement_score(Session& s, const fs::path& key_path,
                         const std::vector<std::string>& rater_paths) {
  const auto key = analysis::read_answer_key(key_path);
  std::vector<analysis::RaterSheet> sheets;
  for (const auto& p : rater_paths) sheets.push_back(analysis::read_rater_file(p));
  const auto result = analysis::agreement_score(key, sheets);
  const auto digest = s.corpus_digest();
  Json report;
  report["provenance"] = s.provenance(digest);
  report["agreement"] = analysis::to_json(result);
  write_json(s.report("agreement.json"), report);
  write_file(s.report("agreement.txt"), analysis::render_agreement(result));
  s.record_stage("agreement_score", digest,
                 Json{{"items", key.size()}, {"raters", sheets.size()}});
  s.out() << analysis::render_agreement(result);
}

void cmd_benchmark(Session& s, const fs::path& dataset) {
  const auto items = analysis::read_benchmark_dataset(dataset);
  auto backend = s.backend();
  const auto result = analysis::f1_benchmark(items, *backend, s.retry());
  const auto digest = s.corpus_digest();
  Json report;
  report["provenance"] = s.provenance(digest);
  report["dataset_digest"] = file_sha256_hex(dataset);
  report["backend"] = backend->id();
  report["benchmark"] = analysis::to_json(result);
  write_json(s.report("benchmark.json"), report);
  write_file(s.report("benchmark.txt"), analysis::render_f1(result));
  s.record_stage("benchmark", digest, analysis::to_json(result));
  s.out() << analysis::render_f1(result);
}

void cmd_report(Session& s) {
  using analysis::GroupBy;
  const auto labels = s.labels();
  const Corpus corpus = s.corpus();
  const auto digest = s.corpus_digest();
  const analysis::LabeledCorpusView view(corpus, labels);
  const RunConfig& c = s.config();

  std::string text;
  text += "config " + c.digest.substr(0, 16) + "  corpus " + digest.substr(0, 16) + "  manifest " +
          kManifestFile + "\n\n";

  const auto overall = analysis::toxicity_ratio(view, GroupBy::All);
  const auto per_game = analysis::toxicity_ratio(view, GroupBy::Game);
  const auto per_genre = analysis::toxicity_ratio(view, GroupBy::Genre);
  if (!overall.empty()) {
    text += "Toxic messages overall: " + analysis::fixed2(100.0 * overall.front().ratio) + "% (" +
            std::to_string(overall.front().toxic) + " of " +
            std::to_string(overall.front().total) + ", " +
            std::to_string(overall.front().invalid) + " invalid)\n\n";
  }
  text += "Relative amount of toxic chat messages per game (%)\n";
  text += analysis::render_ratio_table(per_game, "Game") + "\n";
  text += "Relative amount of toxic chat messages per genre (%)\n";
  text += analysis::render_ratio_table(per_genre, "Genre") + "\n";
  text += "Primary and secondary labels among toxic messages by genre (%)\n";
  text += analysis::render_prevalence_table(view, GroupBy::Genre) + "\n";
  text += "Primary and secondary labels among toxic messages by game (%)\n";
  text += analysis::render_prevalence_table(view, GroupBy::Game) + "\n";

  const auto sub = analysis::cooccurrence(view, analysis::LabelLevel::Subclass);
  text += "Subclass co-occurrence (primary x secondary)\n" + analysis::render_cooccurrence(sub) +
          "\n";
  text += "Category co-occurrence (primary x secondary)\n" +
          analysis::render_cooccurrence(analysis::aggregate_to_categories(sub)) + "\n";

  Json structured;
  structured["provenance"] = s.provenance(digest);
  structured["by_game"] = analysis_json(view, GroupBy::Game, c);
  structured["by_genre"] = analysis_json(view, GroupBy::Genre, c);
  structured["overall"] = analysis::to_json(overall);

  text += "High- vs low-toxicity streams\n";
  try {
    text += analysis::render_high_low(analysis::high_low_comparison(view, c.stats.alpha)) + "\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateSplit) throw;
    text += std::string("not computed: ") + e.what() + "\n\n";
  }
  for (auto unit : {GroupBy::Game, GroupBy::Genre}) {
    text += "Pairwise PERMANOVA / PERMDISP by " + std::string(to_string(unit)) + "\n";
    try {
      text += analysis::render_pairwise(
                  analysis::pairwise_distribution_tests(view, unit, pairwise_config(c))) +
              "\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnitTooSmall && e.code() != ErrorCode::GroupTooSmall) throw;
      text += std::string("not computed: ") + e.what() + "\n\n";
    }
  }
  write_file(s.report("report.txt"), text);
  write_json(s.report("report.json"), structured);
  s.record_stage("report", digest, Json{{"messages", view.messages().size()}});
  s.out() << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toxicity labeling and analysis pipeline for live-stream chat"};
  app.name(args.empty() ? "chattox" : args.front());
  app.require_subcommand(1);
  app.allow_extras(false);

  std::string config_path = "chattox.json";
  app.add_option("-c,--config", config_path, "Run configuration (JSON)");

  std::string ingest_manifest;
  bool strict = false;
  auto* ingest = app.add_subcommand("ingest", "Parse chat dumps listed in a manifest into the corpus");
  ingest->add_option("manifest", ingest_manifest, "Dump manifest (JSON)")->required();
  ingest->add_flag("--strict", strict, "Fail on comments missing required fields");

  std::size_t top = 20;
  auto* prelabel = app.add_subcommand("prelabel", "Apply allowlist and bot rules");
  prelabel->add_option("--top", top, "Most frequent messages to report")->capture_default_str();

  auto* classify = app.add_subcommand("classify", "Label remaining messages with the backend");

  std::string by = "game";
  auto* analyze = app.add_subcommand("analyze", "Compute metrics and statistical tests");
  analyze->add_option("--by", by, "Grouping")
      ->check(CLI::IsMember({"game", "genre", "stream", "all"}))
      ->capture_default_str();

  auto* agreement = app.add_subcommand("agreement", "Human agreement study");
  agreement->require_subcommand(1);
  std::size_t n_toxic = 50;
  std::size_t n_nontoxic = 50;
  std::optional<std::uint64_t> sample_seed;
  std::string sample_out;
  auto* sample = agreement->add_subcommand("sample", "Draw a stratified sample for raters");
  sample->add_option("--toxic", n_toxic, "Toxic messages")->capture_default_str();
  sample->add_option("--nontoxic", n_nontoxic, "Non-toxic messages")->capture_default_str();
  sample->add_option("--seed", sample_seed, "Sampling seed (default: stats.seed)");
  sample->add_option("--out", sample_out, "Output directory (default: <reports>/agreement)");
  std::string key_path;
  std::vector<std::string> rater_paths;
  auto* score = agreement->add_subcommand("score", "Score rater sheets against the answer key");
  score->add_option("--key", key_path, "Answer key TSV")->required();
  score->add_option("raters", rater_paths, "Completed rater sheets")->required();

  std::string dataset;
  auto* benchmark = app.add_subcommand("benchmark", "F1 of the binary stage on a labeled dataset");
  benchmark->add_option("dataset", dataset, "JSON lines with text and gold label")->required();

  auto* report = app.add_subcommand("report", "Render the report tables");

  std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    emit_error(err, "UsageError", e.what(), 2);
    return 2;
  }

  try {
    Session session(config_path, out);
    if (ingest->parsed()) cmd_ingest(session, ingest_manifest, strict);
    else if (prelabel->parsed()) cmd_prelabel(session, top);
    else if (classify->parsed()) cmd_classify(session);
    else if (analyze->parsed()) cmd_analyze(session, *analysis::parse_group_by(by));
    else if (sample->parsed()) {
      cmd_agreement_sample(session, n_toxic, n_nontoxic, sample_seed, sample_out);
    } else if (score->parsed()) cmd_agreement_score(session, key_path, rater_paths);
    else if (benchmark->parsed()) cmd_benchmark(session, dataset);
    else if (report->parsed()) cmd_report(session);
    return 0;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    emit_error(err, to_string(e.code()), e.what(), code);
    return code;
  } catch (const BackendError& e) {
    emit_error(err, "BackendUnavailable", e.what(), 4);
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    emit_error(err, "FileNotReadable", e.what(), 3);
    return 3;
  } catch (const std::exception& e) {
    emit_error(err, "InternalError", e.what(), 5);
    return 5;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace chattox::cli
