/*
 * Copyright 2026 The prsrank Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "prsrank/weighting.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace prsrank {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

double pair_weight(const WeightScheme& scheme, double p_i, double p_j) {
  if (!(p_i > 0.0 && p_i <= 1.0) || !(p_j > 0.0 && p_j <= 1.0)) {
    throw std::invalid_argument("propensities must lie in (0, 1]");
  }
  const double inverse = std::min(scheme.clip_inverse, 1.0 / p_i);
  switch (scheme.kind) {
    case SchemeKind::kNaive:
      return 1.0;
    case SchemeKind::kIps:
      return inverse;
    case SchemeKind::kPns:
      return p_j;
    case SchemeKind::kPrs:
      return std::min(scheme.clip_gamma, p_j * inverse);
  }
  return 1.0;
}

std::vector<TrainingPair> generate_pairs(const ClickSession& session,
                                         PairStrategy strategy,
                                         const WeightScheme& scheme,
                                         std::size_t session_index) {
  if (strategy == PairStrategy::kClickedVsIrrelevantOracle &&
      !session.hidden_relevance) {
    throw std::invalid_argument(
        "oracle pair strategy needs a session with hidden relevance");
  }
  std::vector<TrainingPair> pairs;
  const std::size_t n = session.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!session.clicks[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      switch (strategy) {
        case PairStrategy::kClickedVsAll:
          break;
        case PairStrategy::kClickedVsNonClicked:
          if (session.clicks[j]) continue;
          break;
        case PairStrategy::kClickedVsIrrelevantOracle:
          if (session.clicks[j] || (*session.hidden_relevance)[j]) continue;
          break;
      }
      pairs.push_back({session_index, i, j,
                       pair_weight(scheme, session.propensities[i],
                                   session.propensities[j])});
    }
  }
  return pairs;
}

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kNaive: return "naive";
    case SchemeKind::kIps: return "ips";
    case SchemeKind::kPns: return "pns";
    case SchemeKind::kPrs: return "prs";
  }
  return "?";
}

std::string_view to_string(PairStrategy strategy) {
  switch (strategy) {
    case PairStrategy::kClickedVsAll: return "clicked_vs_all";
    case PairStrategy::kClickedVsNonClicked: return "clicked_vs_nonclicked";
    case PairStrategy::kClickedVsIrrelevantOracle: return "clicked_vs_irrelevant_oracle";
  }
  return "?";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  const std::string n = lower(name);
  for (auto kind : {SchemeKind::kNaive, SchemeKind::kIps, SchemeKind::kPns,
                    SchemeKind::kPrs}) {
    if (n == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown weighting scheme '" + std::string(name) + "'");
}

PairStrategy parse_pair_strategy(std::string_view name) {
  const std::string n = lower(name);
  for (auto s : {PairStrategy::kClickedVsAll, PairStrategy::kClickedVsNonClicked,
                 PairStrategy::kClickedVsIrrelevantOracle}) {
    if (n == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown pair strategy '" + std::string(name) + "'");
}

}  // namespace prsrank
