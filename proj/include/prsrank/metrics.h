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

#ifndef PRSRANK_METRICS_H_
#define PRSRANK_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prsrank/data.h"
#include "prsrank/ranker.h"

namespace prsrank {

// All metrics order documents by descending score with ties broken by the
// lower document index (see rank_order).

// DCG@k / ideal DCG@k with gain 2^rel - 1 and discount 1/log2(position + 1)
// for 1-based positions. Returns 0 when there is no relevant document.
double ndcg_at_k(std::span<const double> scores,
                 std::span<const std::uint8_t> relevance, std::size_t k);

// Mean over relevant documents of precision at their positions; nullopt
// when nothing is relevant.
std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const std::uint8_t> relevance);

// (1/n) * sum of 0-based positions of relevant documents.
double arp(std::span<const double> scores, std::span<const std::uint8_t> relevance);

struct ClickedRank {
  std::size_t rank = 1;  // 1-based
  double weight = 1.0;
};

// sum w / rank  /  sum w.
double wmrr(std::span<const ClickedRank> sessions);

struct QueryMetrics {
  std::string qid;
  std::size_t num_docs = 0;
  std::size_t num_relevant = 0;
  std::map<std::size_t, double> ndcg;
  std::optional<double> average_precision;
  double arp = 0.0;
};

struct MetricReport {
  std::map<std::size_t, double> ndcg_at_k;
  double map_score = 0.0;
  double arp = 0.0;
  // Queries with at least one relevant document (NDCG/MAP denominators).
  std::size_t evaluated_queries = 0;
  std::size_t total_queries = 0;
  std::vector<QueryMetrics> per_query;
};

MetricReport evaluate(const Ranker& ranker, const Dataset& dataset,
                      std::span<const std::size_t> ks, bool keep_per_query = false);

// Same aggregation from precomputed per-query scores.
MetricReport evaluate_scores(const Dataset& dataset,
                             const std::vector<std::vector<double>>& scores,
                             std::span<const std::size_t> ks,
                             bool keep_per_query = false);

void write_per_query_csv(const MetricReport& report, std::ostream& out);

}  // namespace prsrank

#endif  // PRSRANK_METRICS_H_
