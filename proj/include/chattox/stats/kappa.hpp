#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "chattox/error.hpp"
#include "chattox/stats/result.hpp"

namespace chattox::stats {

/// Cohen's kappa over the joint confusion table of two label sequences.
/// Error(DegenerateAgreement) when expected agreement is 1 (kappa undefined).
template <typename Label>
KappaResult cohen_kappa(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cohen_kappa: sequences must be equal and non-empty");
  }
  std::map<Label, std::pair<std::size_t, std::size_t>> marginals;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++marginals[a[i]].first;
    ++marginals[b[i]].second;
    if (a[i] == b[i]) ++agree;
  }
  const double n = static_cast<double>(a.size());
  KappaResult r;
  r.observed_agreement = static_cast<double>(agree) / n;
  for (const auto& [label, counts] : marginals) {
    r.expected_agreement +=
        (static_cast<double>(counts.first) / n) * (static_cast<double>(counts.second) / n);
  }
  if (r.expected_agreement >= 1.0) {
    throw Error(ErrorCode::DegenerateAgreement,
                "cohen_kappa: both raters used one identical label throughout");
  }
  r.kappa = (r.observed_agreement - r.expected_agreement) / (1.0 - r.expected_agreement);
  return r;
}

template <typename Label>
KappaResult cohen_kappa(const std::vector<Label>& a, const std::vector<Label>& b) {
  return cohen_kappa(std::span<const Label>(a), std::span<const Label>(b));
}

}  // namespace chattox::stats
