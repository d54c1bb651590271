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

#ifndef PRSRANK_WEIGHTING_H_
#define PRSRANK_WEIGHTING_H_

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "prsrank/simulate.h"

namespace prsrank {

enum class SchemeKind { kNaive, kIps, kPns, kPrs };

// How a pair (clicked i, compared j) is weighted from the propensities of
// its two documents:
//   Naive: 1
//   IPS:   min(clip_inverse, 1/p_i)
//   PNS:   p_j
//   PRS:   min(clip_gamma, p_j * min(clip_inverse, 1/p_i))
struct WeightScheme {
  SchemeKind kind = SchemeKind::kPrs;
  double clip_gamma = std::numeric_limits<double>::infinity();
  double clip_inverse = std::numeric_limits<double>::infinity();
};

enum class PairStrategy {
  kClickedVsAll,
  kClickedVsNonClicked,
  // Needs hidden_relevance; only meaningful for oracle-mode logs.
  kClickedVsIrrelevantOracle,
};

// Positions index the session's presented order.
struct TrainingPair {
  std::size_t session = 0;
  std::size_t i = 0;  // clicked
  std::size_t j = 0;  // compared
  double weight = 0.0;
};

double pair_weight(const WeightScheme& scheme, double p_i, double p_j);

std::vector<TrainingPair> generate_pairs(const ClickSession& session,
                                         PairStrategy strategy,
                                         const WeightScheme& scheme,
                                         std::size_t session_index = 0);

std::string_view to_string(SchemeKind kind);
std::string_view to_string(PairStrategy strategy);
// Accepts the to_string spellings case-insensitively; throws
// std::invalid_argument otherwise.
SchemeKind parse_scheme_kind(std::string_view name);
PairStrategy parse_pair_strategy(std::string_view name);

}  // namespace prsrank

#endif  // PRSRANK_WEIGHTING_H_
