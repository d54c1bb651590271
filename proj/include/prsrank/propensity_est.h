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

#ifndef PRSRANK_PROPENSITY_EST_H_
#define PRSRANK_PROPENSITY_EST_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "prsrank/data.h"
#include "prsrank/ranker.h"

namespace prsrank {

// Click tallies for one adjacent pair (k-1, k), collected only over sessions
// in which that pair was the randomized one.
struct SwapCounts {
  std::size_t position = 2;  // k, 1-based; the pair is (k-1, k)
  double clicks_upper = 0.0;  // clicks at position k-1
  double clicks_lower = 0.0;  // clicks at position k
  std::size_t sessions = 0;
};

struct SwapLog {
  // pairs[m] covers position k = m + 2, contiguous up to max_position().
  std::vector<SwapCounts> pairs;

  std::size_t max_position() const { return pairs.size() + 1; }
  // Adds counts position by position; both logs must cover the same range.
  void merge(const SwapLog& other);
};

// p_k / p_1 for k = 1..K as the chain product of adjacent click ratios.
// Throws std::invalid_argument naming the position when an upper count is 0.
std::vector<double> estimate_ratios(const SwapLog& log);

// Propensity by rank built from estimated ratios. Ranks up to the estimated
// depth use the ratios (capped at 1); deeper ranks continue the power law
// fitted to them by least squares in log-log space.
struct PropensityCurve {
  std::vector<double> ratios;
  double fitted_eta = 0.0;

  double operator()(std::size_t rank) const;
};
PropensityCurve fit_propensity_curve(std::vector<double> ratios);

struct SwapExperimentConfig {
  // About half of the sessions present the swapped order.
  std::size_t sessions = 200000;
  std::size_t max_position = 5;  // K
  double eta = 1.0;
  double mu = 0.1;
  std::uint64_t seed = 0;
};

// Per session: sample a query, rank it with `ranker`, pick k uniformly in
// 2..min(K, n), swap the documents at k-1 and k with probability 1/2, then
// draw position-based clicks and tally the clicks at k-1 and k. Randomizing
// the order within the pair makes both positions see the same relevance
// distribution, so the click ratio isolates p_k / p_{k-1}.
SwapLog simulate_swap_experiment(const Ranker& ranker, const Dataset& pool,
                                 const SwapExperimentConfig& config);

// CSV: position,clicks_upper,clicks_lower,sessions
void write_swap_log(const SwapLog& log, std::ostream& out);
SwapLog read_swap_log(std::istream& in);

}  // namespace prsrank

#endif  // PRSRANK_PROPENSITY_EST_H_
