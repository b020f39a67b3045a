#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "chattox/backend.hpp"

namespace chattox::analysis {

struct BenchmarkItem {
  std::string text;
  bool toxic = false;
};

/// JSON lines with "text" and a gold field "toxic" (bool or 0/1) or
/// "label" ("toxic"/"nontoxic"/0/1).
std::vector<BenchmarkItem> read_benchmark_dataset(const std::filesystem::path& path);

struct F1Report {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t invalid = 0;  // also counted as non-toxic predictions
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Binary stage with an empty context on every item; F1 of the toxic class.
F1Report f1_benchmark(std::span<const BenchmarkItem> items, Backend& backend,
                      const RetryPolicy& retry = {});

}  // namespace chattox::analysis
