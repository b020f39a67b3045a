// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../support/dumps.hpp"
#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"
#include "../support/tempdir.hpp"
#include "chattox/analysis/agreement.hpp"
#include "chattox/analysis/benchmark.hpp"
#include "chattox/analysis/metrics.hpp"
#include "chattox/analysis/report.hpp"
#include "chattox/classifier.hpp"
#include "chattox/cli/app.hpp"
#include "chattox/stats/kappa.hpp"
#include "chattox/stats/pcoa.hpp"
#include "chattox/stats/permutation.hpp"
#include "chattox/stats/univariate.hpp"

using namespace chattox;
namespace fs = std::filesystem;

namespace {

/// Collects failed checks for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void near(double got, double want, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: got %.17g want %.17g", what.c_str(), got, want);
    expect(std::abs(got - want) <= tol, buf);
  }
  void note(std::string text) { notes_ = std::move(text); }

  bool ok() const { return failed_ == 0; }
  std::string detail() const {
    std::string out = std::to_string(checks_) + " checks";
    if (!notes_.empty()) out += ", " + notes_;
    for (const auto& f : failures_) out += "; " + f;
    if (failed_ > failures_.size()) out += "; ...";
    return out;
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RetryPolicy no_sleep() {
  RetryPolicy p;
  p.sleep = [](std::chrono::milliseconds) {};
  return p;
}

stats::DistanceMatrix<double> line_distances(const std::vector<double>& x) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) rows(static_cast<Eigen::Index>(i), 0) = x[i];
  return stats::distance_matrix(rows, stats::Metric::Euclidean);
}

// 1
void statistic_oracles(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  // 2x2 table a=45 (yes/yes), b=15, c=25, d=15: po = 0.6, pe = 0.54, kappa = 3/23.
  std::vector<int> r1;
  std::vector<int> r2;
  auto add = [&](int a, int b, int n) {
    for (int i = 0; i < n; ++i) {
      r1.push_back(a);
      r2.push_back(b);
    }
  };
  add(1, 1, 45);
  add(1, 0, 15);
  add(0, 1, 25);
  add(0, 0, 15);
  c.near(stats::cohen_kappa(r1, r2).kappa, 3.0 / 23.0, 1e-12, "kappa");
  c.expect(std::abs(3.0 / 23.0 - 0.1304) < 5e-5, "kappa ~ 0.1304");

  const auto f = stats::anova_oneway({{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
  c.near(f.statistic, 3.0, 1e-12, "anova F");
  c.near(*f.df1, 2.0, 1e-12, "anova df1");
  c.near(*f.df2, 6.0, 1e-12, "anova df2");

  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {2, 3, 4, 5, 6};
  const auto t = stats::welch_t(a, b);
  c.near(t.statistic, -1.0, 1e-12, "welch t");
  c.near(*t.df1, 8.0, 1e-12, "welch df");

  Eigen::Vector2d u(1, 1);
  Eigen::Vector2d v(1, 3);
  c.expect(stats::bray_curtis(u, v) == 1.0 / 3.0, "bray-curtis == 1/3");

  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 1.0, "runtime under 1 s");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f s", elapsed);
  c.note(buf);
}

// 2
void permutation_exactness(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2025);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const std::vector<std::vector<int>> layouts = {
      {0, 0, 1, 1},          {0, 0, 1, 1, 1},       {0, 0, 0, 1, 1, 1},
      {0, 0, 1, 1, 2, 2},    {0, 0, 0, 1, 1, 1, 1}, {0, 0, 1, 1, 2, 2, 2},
      {0, 0, 0, 0, 1, 1, 1, 1}, {0, 0, 0, 1, 1, 1, 1, 1}, {0, 0, 1, 1, 1, 2, 2, 2}};
  const stats::PermutationPlan exact{0, 0, true, 1};
  std::size_t fixtures = 0;
  double worst_mc = 0.0;
  for (const auto& labels : layouts) {
    for (int metric = 0; metric < 2; ++metric) {
      ++fixtures;
      const auto n = static_cast<Eigen::Index>(labels.size());
      Eigen::MatrixXd rows(n, 3);
      for (Eigen::Index i = 0; i < rows.size(); ++i) rows(i) = metric == 0 ? normal(rng) : u01(rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        const int g = labels[static_cast<std::size_t>(i)];
        rows.row(i).array() += 0.6 * g;
        if (g == 1) rows.row(i) *= 1.8;
      }
      const bool bray = metric == 1;
      const auto d = stats::distance_matrix(rows, bray ? stats::Metric::BrayCurtis
                                                       : stats::Metric::Euclidean);
      const oracle::Matrix dm = oracle::distances(rows, bray);
      const std::string name = "layout n=" + std::to_string(n) + (bray ? " bray" : " euclid");

      const double want_anova = oracle::brute_force_p(
          labels, [&](const std::vector<int>& l) { return oracle::pseudo_f_trace(dm, l); });
      const auto z = oracle::centroid_distances(dm, labels);
      const double want_disp = oracle::brute_force_p(
          labels, [&](const std::vector<int>& l) { return oracle::anova_f(z, l); });

      const auto got_anova = stats::permanova(d, labels, exact);
      const auto got_disp = stats::permdisp(d, labels, exact);
      c.expect(got_anova.p_value == want_anova, name + " permanova exact p");
      c.expect(got_disp.p_value == want_disp, name + " permdisp exact p");

      const stats::PermutationPlan mc{9999, 1000 + fixtures, false, 2};
      const auto mc_anova = stats::permanova(d, labels, mc);
      const auto mc_disp = stats::permdisp(d, labels, mc);
      worst_mc = std::max({worst_mc, std::abs(mc_anova.p_value - want_anova),
                           std::abs(mc_disp.p_value - want_disp)});
      c.near(mc_anova.p_value, want_anova, 0.02, name + " permanova Monte Carlo");
      c.near(mc_disp.p_value, want_disp, 0.02, name + " permdisp Monte Carlo");
    }
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 30.0, "runtime under 30 s");
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu fixtures, worst Monte Carlo gap %.4f, %.2f s", fixtures,
                worst_mc, elapsed);
  c.note(buf);
}

// 3
void anova_equivalence(Check& c) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 4;
    std::vector<double> x;
    std::vector<int> g;
    stats::Groups groups(static_cast<std::size_t>(k));
    for (int grp = 0; grp < k; ++grp) {
      const int size = 2 + static_cast<int>(rng() % 7);
      for (int i = 0; i < size; ++i) {
        const double v = normal(rng) * (1.0 + grp) + 0.4 * grp;
        x.push_back(v);
        g.push_back(grp);
        groups[static_cast<std::size_t>(grp)].push_back(v);
      }
    }
    const double pseudo = stats::permanova(line_distances(x), g, 1, 1).statistic;
    const double classic = stats::anova_oneway(groups).statistic;
    worst = std::max(worst, std::abs(pseudo - classic));
    c.near(pseudo, classic, 1e-9, "trial " + std::to_string(trial));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "100 fixtures, max |dF| %.2e", worst);
  c.note(buf);
}

// 4
void pcoa_fidelity(Check& c) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 19);
    const Eigen::Index dim = 1 + static_cast<Eigen::Index>(rng() % 5);
    Eigen::MatrixXd pts(n, dim);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i) = 3.0 * normal(rng);
    const auto d = stats::distance_matrix(pts, stats::Metric::Euclidean);
    const auto p = stats::pcoa(d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double sq = 0.0;
        for (Eigen::Index k = 0; k < p.axes(); ++k) {
          const double diff = p.coordinates(i, k) - p.coordinates(j, k);
          sq += (p.negative[static_cast<std::size_t>(k)] ? -1.0 : 1.0) * diff * diff;
        }
        const double rebuilt = std::sqrt(std::max(0.0, sq));
        worst = std::max(worst, std::abs(rebuilt - d.values(i, j)));
      }
    }
  }
  c.expect(worst <= 1e-9, "max reconstruction error within 1e-9");
  char buf[64];
  std::snprintf(buf, sizeof buf, "50 point sets, max error %.2e", worst);
  c.note(buf);
}

using Pair = std::pair<Subclass, std::optional<Subclass>>;

testing::SyntheticSpec planted_spec() {
  testing::SyntheticSpec spec;
  spec.seed = 5;
  spec.bots_per_stream = 20;
  spec.allowlisted_per_stream = 35;
  spec.invalid_total = 12;  // 0.06% of 20,000
  spec.games = {
      {"League of Legends", 3, 1000, {30, 25, 40},
       {{Subclass::Bullying, Subclass::Swearing}, {Subclass::Aggression, std::nullopt},
        {Subclass::Bullying, std::nullopt}}},
      {"Dota 2", 3, 1000, {20, 35, 15},
       {{Subclass::Swearing, std::nullopt}, {Subclass::Bullying, Subclass::Aggression}}},
      {"Valorant", 3, 1000, {18, 22, 26},
       {{Subclass::Swearing, Subclass::Bullying}, {Subclass::SexualityGender, std::nullopt}}},
      {"Counter-Strike 2", 3, 1000, {12, 16, 20},
       {{Subclass::RaceEthnicityReligion, Subclass::Swearing}, {Subclass::Bullying, std::nullopt}}},
      {"Cyberpunk 2077", 2, 1000, {6, 9},
       {{Subclass::SexBasedTerms, std::nullopt}, {Subclass::Misogyny, Subclass::SexBasedTerms}}},
      {"EA Sports FC 26", 3, 1000, {14, 10, 18},
       {{Subclass::Disability, Subclass::Bullying}, {Subclass::Aggression, Subclass::Swearing}}},
      {"Minecraft", 3, 1000, {5, 4, 3}, {{Subclass::Bullying, std::nullopt}}},
  };
  return spec;
}

struct PlantedCounts {
  std::map<std::string, std::size_t> toxic;
  std::map<std::string, std::size_t> total;
  std::map<std::string, std::map<std::string, std::size_t>> primary;
  std::map<std::string, std::map<std::string, std::size_t>> secondary;
  std::map<std::string, std::map<std::string, std::size_t>> combined_category;
  std::map<std::pair<int, int>, std::int64_t> cells;
  std::map<int, std::int64_t> primary_only;
};

PlantedCounts count_planted(const testing::SyntheticCorpus& synth, bool by_genre) {
  PlantedCounts p;
  for (const auto& s : synth.corpus.streams) {
    std::string key = s.meta.game;
    if (by_genre) {
      if (!s.meta.genre) continue;
      key = std::string(display_name(*s.meta.genre));
    }
    for (const auto& m : s.messages) {
      const auto& t = synth.truth.at(m.message_id);
      ++p.total[key];
      if (!t.toxic) continue;
      ++p.toxic[key];
      ++p.primary[key][std::string(canonical_string(*t.primary))];
      std::set<std::string> cats = {std::string(canonical_string(category_of(*t.primary)))};
      if (t.secondary) {
        ++p.secondary[key][std::string(canonical_string(*t.secondary))];
        cats.insert(std::string(canonical_string(category_of(*t.secondary))));
        ++p.cells[{static_cast<int>(index_of(*t.primary)), static_cast<int>(index_of(*t.secondary))}];
      } else {
        ++p.primary_only[static_cast<int>(index_of(*t.primary))];
      }
      for (const auto& cat : cats) ++p.combined_category[key][cat];
    }
  }
  return p;
}

// 5
void planted_truth(Check& c) {
  const auto synth = testing::make_corpus(planted_spec());
  c.expect(synth.corpus.streams.size() >= 10, "at least 10 streams");
  c.expect(synth.corpus.message_count() >= 10000, "at least 10,000 messages");

  std::istringstream script(testing::script_for(synth.corpus));
  std::vector<ScriptRule> rules;
  for (std::string line; std::getline(script, line);) {
    const auto j = nlohmann::json::parse(line);
    rules.push_back({j["contains"], j.value("binary", "yes"), j.value("subclass", "")});
  }
  ScriptedBackend backend(rules);
  testing::TempDir dir;
  LabelStore store(dir / "labels.jsonl");
  ClassifyConfig cfg;
  cfg.retry = no_sleep();
  cfg.max_in_flight = 4;
  const auto assignment = apply_prelabels(synth.corpus, PreLabelRuleSet::defaults());
  classify_corpus(synth.corpus, assignment, backend, store, cfg);
  const auto labels = store.records();
  const analysis::LabeledCorpusView view(synth.corpus, labels);

  for (bool by_genre : {false, true}) {
    const auto by = by_genre ? analysis::GroupBy::Genre : analysis::GroupBy::Game;
    const auto want = count_planted(synth, by_genre);
    const auto ratios = analysis::toxicity_ratio(view, by);
    c.expect(ratios.size() == want.total.size(), "group count");
    for (const auto& r : ratios) {
      c.expect(r.toxic == want.toxic.at(r.group), r.group + " toxic count");
      c.expect(r.total == want.total.at(r.group), r.group + " total count");
      c.expect(r.ratio == static_cast<double>(want.toxic.at(r.group)) /
                              static_cast<double>(want.total.at(r.group)),
               r.group + " ratio");
    }
    using analysis::LabelLevel;
    using analysis::LabelSlot;
    auto check_prevalence = [&](LabelLevel level, LabelSlot slot,
                                const std::map<std::string, std::map<std::string, std::size_t>>& m,
                                const std::string& what) {
      for (const auto& row : analysis::label_prevalence(view, level, slot, by)) {
        std::size_t expected = 0;
        if (auto g = m.find(row.group); g != m.end()) {
          if (auto l = g->second.find(row.label); l != g->second.end()) expected = l->second;
        }
        c.expect(row.count == expected, what + " " + row.group + "/" + row.label);
        c.expect(row.toxic == want.toxic.at(row.group), what + " denominator " + row.group);
      }
    };
    check_prevalence(LabelLevel::Subclass, LabelSlot::Primary, want.primary, "primary");
    check_prevalence(LabelLevel::Subclass, LabelSlot::Secondary, want.secondary, "secondary");
    check_prevalence(LabelLevel::Category, LabelSlot::Combined, want.combined_category,
                     "combined category");
  }

  const auto want = count_planted(synth, false);
  const auto co = analysis::cooccurrence(view, analysis::LabelLevel::Subclass);
  for (Eigen::Index i = 0; i < co.counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < co.counts.cols(); ++j) {
      const auto it = want.cells.find({static_cast<int>(i), static_cast<int>(j)});
      c.expect(co.counts(i, j) == (it == want.cells.end() ? 0 : it->second), "co-occurrence cell");
    }
    const auto it = want.primary_only.find(static_cast<int>(i));
    c.expect(co.primary_only(i) == (it == want.primary_only.end() ? 0 : it->second),
             "primary-only count");
  }
  std::size_t toxic = 0;
  for (const auto& [k, v] : want.toxic) toxic += v;
  c.expect(co.toxic_total == static_cast<std::int64_t>(toxic), "co-occurrence total");

  // Genre ratios are the total-weighted means of their games' ratios.
  const auto games = analysis::toxicity_ratio(view, analysis::GroupBy::Game);
  const auto genres = analysis::toxicity_ratio(view, analysis::GroupBy::Genre);
  for (const auto& g : genres) {
    std::size_t sum_toxic = 0;
    std::size_t sum_total = 0;
    double weighted = 0.0;
    for (const auto& game : games) {
      const auto genre = genre_of(game.group);
      if (!genre || display_name(*genre) != g.group) continue;
      sum_toxic += game.toxic;
      sum_total += game.total;
      weighted += game.ratio * static_cast<double>(game.total);
    }
    c.expect(g.toxic == sum_toxic && g.total == sum_total, g.group + " weighted-mean counts");
    c.near(g.ratio, weighted / static_cast<double>(sum_total), 1e-15, g.group + " weighted mean");
  }
  c.note(std::to_string(synth.corpus.streams.size()) + " streams, " +
         std::to_string(synth.corpus.message_count()) + " messages, " + std::to_string(toxic) +
         " planted toxic");
}

// 6
void pipeline_invariants(Check& c) {
  const auto synth = testing::make_corpus(planted_spec());
  const auto assignment = apply_prelabels(synth.corpus, PreLabelRuleSet::defaults());
  ClassifyConfig cfg;
  cfg.retry = no_sleep();
  cfg.max_in_flight = 4;
  testing::TempDir dir;

  MockBackend mock(testing::planted_response);
  ClassificationSummary full;
  {
    LabelStore store(dir / "full.jsonl");
    full = classify_corpus(synth.corpus, assignment, mock, store, cfg);
  }
  std::size_t prelabeled_requests = 0;
  std::size_t stage2_non_toxic = 0;
  std::size_t toxic_planted = 0;
  std::size_t invalid_planted = 0;
  for (const auto& [id, t] : synth.truth) {
    toxic_planted += t.toxic ? 1 : 0;
    invalid_planted += t.invalid ? 1 : 0;
  }
  for (const auto& p : mock.requests()) {
    const auto& t = synth.truth.at(p.message_id);
    if (t.bot || t.allowlisted) ++prelabeled_requests;
    if (p.stage == PromptStage::Subclass && !t.toxic) ++stage2_non_toxic;
  }
  c.expect(prelabeled_requests == 0, "no requests for allowlisted or bot messages");
  c.expect(stage2_non_toxic == 0, "stage 2 only after a toxic stage-1 answer");
  c.expect(full.stage2_requests == toxic_planted, "one stage-2 request per toxic message");
  c.expect(full.stage1_requests == assignment.needs_classification, "one stage-1 request each");

  const std::size_t total = synth.corpus.message_count();
  c.expect(full.count(LabelStatus::Invalid) == invalid_planted, "invalid count recovered");
  c.expect(full.invalid_rate() == static_cast<double>(invalid_planted) / static_cast<double>(total),
           "invalid rate");
  c.near(full.invalid_rate(), 0.0006, 1e-12, "invalid rate is 0.06%");
  c.expect(full.count(LabelStatus::Toxic) == toxic_planted, "invalid not counted as toxic");
  {
    const auto labels = read_label_store(dir / "full.jsonl");
    const analysis::LabeledCorpusView view(synth.corpus, labels);
    const auto all = analysis::toxicity_ratio(view, analysis::GroupBy::All);
    c.expect(all[0].toxic == toxic_planted, "toxic numerator excludes invalid");
    c.expect(all[0].invalid == invalid_planted, "invalid reported");
    const auto co = analysis::cooccurrence(view, analysis::LabelLevel::Subclass);
    c.expect(co.toxic_total == static_cast<std::int64_t>(toxic_planted),
             "prevalence denominator excludes invalid");
  }

  // Kill at several points, tear the tail once, then resume.
  for (std::size_t kill_after : {1u, 777u, 4321u, 12000u}) {
    const fs::path path = dir / ("resumed-" + std::to_string(kill_after) + ".jsonl");
    std::atomic<std::size_t> calls{0};
    MockBackend dying([&](const PromptPayload& p) {
      if (++calls > kill_after) throw std::runtime_error("killed");
      return testing::planted_response(p);
    });
    bool threw = false;
    {
      LabelStore store(path);
      try {
        classify_corpus(synth.corpus, assignment, dying, store, cfg);
      } catch (const std::runtime_error&) {
        threw = true;
      }
    }
    c.expect(threw, "run interrupted");
    if (kill_after == 777u) {
      std::ofstream torn(path, std::ios::app | std::ios::binary);
      torn << "{\"message_id\":\"dead";
    }
    MockBackend rest(testing::planted_response);
    ClassifyConfig serial = cfg;
    serial.max_in_flight = kill_after % 2 == 0 ? 1 : 3;
    {
      LabelStore store(path);
      classify_corpus(synth.corpus, assignment, rest, store, serial);
    }
    c.expect(rest.request_count() + std::min<std::size_t>(calls, kill_after) >=
                 mock.request_count(),
             "resume covers the remaining work");
    c.expect(testing::read_text(path) == testing::read_text(dir / "full.jsonl"),
             "store byte-identical after kill at " + std::to_string(kill_after));
  }
  MockBackend idle(testing::planted_response);
  {
    LabelStore store(dir / "full.jsonl");
    classify_corpus(synth.corpus, assignment, idle, store, cfg);
  }
  c.expect(idle.request_count() == 0, "completed store needs no requests");

  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu invalid of %zu = %.4f%%", full.count(LabelStatus::Invalid),
                total, 100.0 * full.invalid_rate());
  c.note(buf);
}

// 7
void context_correctness(Check& c) {
  Corpus corpus;
  for (int s = 0; s < 12; ++s) {
    add_stream(corpus, testing::random_stream("r" + std::to_string(s), 150 + 40 * s,
                                             static_cast<std::uint64_t>(70 + s)));
  }
  const auto assignment = apply_prelabels(corpus, PreLabelRuleSet{});
  MockBackend mock([](const PromptPayload&) { return "no"; });
  testing::TempDir dir;
  LabelStore store(dir / "labels.jsonl");
  ClassifyConfig cfg;
  cfg.retry = no_sleep();
  cfg.max_in_flight = 3;
  classify_corpus(corpus, assignment, mock, store, cfg);

  std::map<std::string, std::pair<std::size_t, std::size_t>> where;
  for (std::size_t s = 0; s < corpus.streams.size(); ++s) {
    for (std::size_t i = 0; i < corpus.streams[s].messages.size(); ++i) {
      where[corpus.streams[s].messages[i].message_id] = {s, i};
    }
  }
  std::size_t capped = 0;
  std::size_t checked = 0;
  for (const auto& p : mock.requests()) {
    const auto [s, i] = where.at(p.message_id);
    const auto& msgs = corpus.streams[s].messages;
    const double t = msgs[i].offset_s;
    std::vector<std::size_t> expected;
    for (std::size_t j = 0; j < msgs.size(); ++j) {
      if (msgs[j].offset_s >= t - 10.0 && msgs[j].offset_s < t) expected.push_back(msgs[j].seq);
    }
    if (expected.size() > 50) {
      expected.erase(expected.begin(), expected.end() - 50);
      ++capped;
    }
    std::vector<std::size_t> got;
    std::string rendered = "Context:\n";
    for (const auto& line : p.context.lines) {
      got.push_back(line.seq);
      rendered += line.user + ": " + line.text + "\n";
    }
    if (got.empty()) rendered += "(no prior context)\n";
    ++checked;
    c.expect(got == expected, "context of " + msgs[i].stream_id + "#" + std::to_string(i));
    c.expect(p.user_content.rfind(rendered, 0) == 0, "rendered context matches");
  }
  c.expect(checked == corpus.message_count(), "every message requested");
  c.expect(capped > 0, "fixture exercises the 50-message cap");
  c.note(std::to_string(checked) + " requests, " + std::to_string(capped) + " capped");
}

// 8
void agreement_harness(Check& c) {
  std::vector<analysis::KeyRow> key;
  for (int i = 0; i < 100; ++i) {
    key.push_back({"s" + std::to_string(i), i < 50,
                   i < 50 ? std::optional(i % 3 == 0 ? Subclass::Swearing : Subclass::Bullying)
                          : std::nullopt});
  }
  analysis::RaterSheet self{"key", {}};
  for (const auto& k : key) self.rows.push_back({k.sample_id, k.toxic, k.primary});
  const auto identity = analysis::agreement_score(key, std::vector<analysis::RaterSheet>{self});
  c.expect(identity.model_vs_human[0].kappa == 1.0, "key as rater gives kappa 1.0");

  // With a 50/50 key, pe = 0.5 whatever the rater's marginals, so kappa = 1 - 2 * flips / 100.
  auto rater = [&](const std::string& name, int flips) {
    analysis::RaterSheet s{name, {}};
    for (int i = 0; i < 100; ++i) {
      const bool flip = i < 50 ? i < (flips + 1) / 2 : i - 50 < flips / 2;
      const auto& k = key[static_cast<std::size_t>(i)];
      s.rows.push_back({k.sample_id, flip ? !k.toxic : k.toxic, std::nullopt});
    }
    return s;
  };
  const std::vector<analysis::RaterSheet> raters = {rater("a", 28), rater("b", 27), rater("c", 15)};
  const auto r = analysis::agreement_score(key, raters);
  const double want[] = {0.44, 0.46, 0.70};
  for (std::size_t i = 0; i < 3; ++i) {
    c.near(*r.model_vs_human[i].kappa, want[i], 1e-12, "rater " + raters[i].rater);
  }
  c.expect(analysis::fixed2(*r.mean_model_vs_human) == "0.53", "mean reported as 0.53");
  c.note("mean " + analysis::fixed2(*r.mean_model_vs_human));
}

// 9
void benchmark_harness(Check& c) {
  std::vector<analysis::BenchmarkItem> items;
  for (int i = 0; i < 100; ++i) items.push_back({"toxic item " + std::to_string(i), true});
  for (int i = 0; i < 100; ++i) items.push_back({"clean item " + std::to_string(i), false});
  MockBackend oracle([](const PromptPayload& p) {
    return testing::target_text(p).rfind("toxic", 0) == 0 ? "yes" : "no";
  });
  MockBackend always([](const PromptPayload&) { return "yes"; });
  const auto perfect = analysis::f1_benchmark(items, oracle, no_sleep());
  const auto constant = analysis::f1_benchmark(items, always, no_sleep());
  c.near(perfect.f1, 1.0, 0.0, "oracle F1");
  c.near(constant.f1, 2.0 / 3.0, 1e-12, "always-toxic F1");
  char buf[64];
  std::snprintf(buf, sizeof buf, "F1 %.12f and %.12f", perfect.f1, constant.f1);
  c.note(buf);
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full = {"chattox"};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(full, out, err);
  if (code != 0) std::fprintf(stderr, "%s\n", err.str().c_str());
  return code;
}

// 10
void determinism(Check& c) {
  testing::SyntheticSpec spec = planted_spec();
  for (auto& g : spec.games) g.messages_per_stream = 300;
  spec.bots_per_stream = 6;
  spec.allowlisted_per_stream = 10;
  spec.invalid_total = 4;
  const auto synth = testing::make_corpus(spec);

  testing::TempDir root;
  // Record a capture log once with the scripted backend.
  const fs::path rec = root / "record";
  testing::write_dumps(synth.corpus, rec / "dumps");
  testing::write_text(rec / "script.jsonl", testing::script_for(synth.corpus));
  testing::write_config(rec, R"({"kind": "scripted", "script": "script.jsonl", "record_log": "capture.jsonl", "max_in_flight": 3})", 999);
  const std::string rc = (rec / "chattox.json").string();
  c.expect(run_cli({"-c", rc, "ingest", (rec / "dumps/manifest.json").string()}) == 0, "record ingest");
  c.expect(run_cli({"-c", rc, "classify"}) == 0, "record classify");

  const std::vector<std::string> outputs = {
      "labels.jsonl",           "reports/report.txt",         "reports/report.json",
      "reports/analysis_game.json", "reports/analysis_genre.json", "reports/classify.json",
      "reports/agreement/rater_sheet.tsv", "reports/agreement/answer_key.tsv"};
  std::vector<std::map<std::string, std::string>> runs;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    testing::write_dumps(synth.corpus, dir / "dumps");
    fs::copy_file(rec / "capture.jsonl", dir / "capture.jsonl");
    testing::write_config(
        dir, R"({"kind": "replay", "replay_log": "capture.jsonl", "max_in_flight": 4})", 999);
    const std::string cfg = (dir / "chattox.json").string();
    bool ok = run_cli({"-c", cfg, "ingest", (dir / "dumps/manifest.json").string()}) == 0;
    ok = ok && run_cli({"-c", cfg, "prelabel"}) == 0;
    ok = ok && run_cli({"-c", cfg, "classify"}) == 0;
    ok = ok && run_cli({"-c", cfg, "analyze", "--by", "game"}) == 0;
    ok = ok && run_cli({"-c", cfg, "analyze", "--by", "genre"}) == 0;
    ok = ok && run_cli({"-c", cfg, "agreement", "sample", "--toxic", "20", "--nontoxic", "20"}) == 0;
    ok = ok && run_cli({"-c", cfg, "report"}) == 0;
    c.expect(ok, "replay run " + std::to_string(run));
    std::map<std::string, std::string> files;
    for (const auto& f : outputs) files[f] = testing::read_text(dir / f);
    runs.push_back(std::move(files));
  }
  std::size_t bytes = 0;
  for (const auto& f : outputs) {
    const std::string& a = runs[0][f];
    const std::string& b = runs[1][f];
    c.expect(!a.empty(), f + " written");
    bytes += a.size();
    c.expect(a == b, f + " byte-identical");
  }
  c.note(std::to_string(outputs.size()) + " files, " + std::to_string(bytes) + " bytes compared");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"statistic oracles", statistic_oracles},
      {"permutation exactness", permutation_exactness},
      {"ANOVA equivalence", anova_equivalence},
      {"PCoA fidelity", pcoa_fidelity},
      {"planted-truth end-to-end", planted_truth},
      {"pipeline invariants", pipeline_invariants},
      {"context correctness", context_correctness},
      {"agreement harness", agreement_harness},
      {"benchmark harness", benchmark_harness},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].second(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %zu (%s): %s\n", check.ok() ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), check.detail().c_str());
    std::fflush(stdout);
    if (!check.ok()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
