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

#ifndef PRSRANK_SIMULATE_H_
#define PRSRANK_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "prsrank/data.h"
#include "prsrank/ranker.h"

namespace prsrank {

// (1/rank)^eta for a 1-based rank. Throws std::invalid_argument for rank 0
// or negative eta.
double observation_propensity(std::size_t rank, double eta);

// Position-based examination model.
struct PropensityModel {
  double eta = 1.0;

  double operator()(std::size_t rank) const {
    return observation_propensity(rank, eta);
  }
};

// Click probability upon observation: 1 - mu for relevant documents, mu for
// irrelevant ones.
struct NoiseModel {
  double mu = 0.1;

  double click_relevant() const { return 1.0 - mu; }
  double click_irrelevant() const { return mu; }
};

// One logged impression. All vectors are aligned to presented order, i.e.
// index k is the document shown at rank k + 1.
struct ClickSession {
  std::string qid;
  std::vector<std::size_t> presented;
  std::vector<std::uint8_t> clicks;
  std::vector<double> propensities;
  // Ground truth, kept only in oracle mode.
  std::optional<std::vector<std::uint8_t>> hidden_observation;
  std::optional<std::vector<std::uint8_t>> hidden_relevance;

  std::size_t size() const { return presented.size(); }
  std::size_t num_clicks() const;
};

struct SimulationConfig {
  double eta = 1.0;
  double mu = 0.1;
  std::uint64_t seed = 0;
  std::size_t total_clicks = 0;
  bool oracle_mode = false;
};

struct ClickLog {
  std::vector<ClickSession> sessions;
  SimulationConfig config;

  std::size_t total_clicks() const;
};

struct LogRegConfig;

// Linear ranker trained on the production slice with graded labels
// (full-information pairs). Returns a zero-weight ranker, with a warning on
// stderr, when the slice has no discordant pairs.
LinearRanker train_production_ranker(const Dataset& production,
                                     const LogRegConfig& config);

// Samples queries uniformly with replacement, presents each in the ranker's
// order and draws observation and click events until the cumulative click
// count reaches total_clicks. Sessions without clicks are retained.
ClickLog simulate_clicks(const Ranker& ranker, const Dataset& pool,
                         const SimulationConfig& config);

// Replaces each session's recorded propensities with
// propensity_by_rank(rank) for its 1-based presented ranks. Used for
// misspecified or estimated propensities.
ClickLog with_propensities(ClickLog log,
                           const std::function<double(std::size_t)>& propensity_by_rank);

// Removes hidden ground-truth fields from every session.
ClickLog strip_hidden(ClickLog log);

// Line-oriented text format. Header:
//   # prsrank-clicklog v1 eta=<e> mu=<m> seed=<s> total_clicks=<n> oracle=<0|1>
// then one tab-separated record per session:
//   qid  presented(comma)  clicks(bitstring)  propensities(comma, %.17g)
//   [observation(bitstring)  relevance(bitstring)]
void write_click_log(const ClickLog& log, std::ostream& out);
void write_click_log(const ClickLog& log, const std::filesystem::path& path);
ClickLog read_click_log(std::istream& in);
ClickLog read_click_log(const std::filesystem::path& path);

}  // namespace prsrank

#endif  // PRSRANK_SIMULATE_H_
