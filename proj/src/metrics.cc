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

#include "prsrank/metrics.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace prsrank {
namespace {

void check_lengths(std::span<const double> scores,
                   std::span<const std::uint8_t> relevance) {
  if (scores.size() != relevance.size()) {
    throw std::invalid_argument("scores and relevance differ in length");
  }
}

double dcg_term(std::uint8_t rel, std::size_t position) {
  const double gain = std::exp2(static_cast<double>(rel)) - 1.0;
  return gain / std::log2(static_cast<double>(position) + 2.0);
}

}  // namespace

double ndcg_at_k(std::span<const double> scores,
                 std::span<const std::uint8_t> relevance, std::size_t k) {
  check_lengths(scores, relevance);
  if (k == 0) throw std::invalid_argument("ndcg cutoff must be >= 1");
  const auto order = rank_order(scores);
  std::vector<std::uint8_t> ideal(relevance.begin(), relevance.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const std::size_t cutoff = std::min(k, scores.size());
  double dcg = 0.0, idcg = 0.0;
  for (std::size_t p = 0; p < cutoff; ++p) {
    dcg += dcg_term(relevance[order[p]], p);
    idcg += dcg_term(ideal[p], p);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const std::uint8_t> relevance) {
  check_lengths(scores, relevance);
  const auto order = rank_order(scores);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t p = 0; p < order.size(); ++p) {
    if (!relevance[order[p]]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(p + 1);
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

double arp(std::span<const double> scores, std::span<const std::uint8_t> relevance) {
  check_lengths(scores, relevance);
  if (scores.empty()) return 0.0;
  const auto order = rank_order(scores);
  double total = 0.0;
  for (std::size_t p = 0; p < order.size(); ++p) {
    if (relevance[order[p]]) total += static_cast<double>(p);
  }
  return total / static_cast<double>(scores.size());
}

double wmrr(std::span<const ClickedRank> sessions) {
  if (sessions.empty()) throw std::invalid_argument("wmrr of an empty session list");
  double numerator = 0.0, denominator = 0.0;
  for (const auto& s : sessions) {
    if (s.rank == 0) throw std::invalid_argument("wmrr ranks are 1-based");
    if (!(s.weight > 0.0)) throw std::invalid_argument("wmrr weights must be positive");
    numerator += s.weight / static_cast<double>(s.rank);
    denominator += s.weight;
  }
  return numerator / denominator;
}

MetricReport evaluate_scores(const Dataset& dataset,
                             const std::vector<std::vector<double>>& scores,
                             std::span<const std::size_t> ks, bool keep_per_query) {
  if (scores.size() != dataset.queries.size()) {
    throw std::invalid_argument("one score vector per query expected");
  }
  MetricReport report;
  report.total_queries = dataset.queries.size();
  for (std::size_t k : ks) report.ndcg_at_k[k] = 0.0;
  double arp_sum = 0.0;
  for (std::size_t q = 0; q < dataset.queries.size(); ++q) {
    const QueryGroup& query = dataset.queries[q];
    QueryMetrics m;
    m.qid = query.qid;
    m.num_docs = query.size();
    m.num_relevant = query.num_relevant();
    m.arp = arp(scores[q], query.binary_relevance);
    arp_sum += m.arp;
    if (m.num_relevant > 0) {
      ++report.evaluated_queries;
      for (std::size_t k : ks) {
        m.ndcg[k] = ndcg_at_k(scores[q], query.binary_relevance, k);
        report.ndcg_at_k[k] += m.ndcg[k];
      }
      m.average_precision = average_precision(scores[q], query.binary_relevance);
      report.map_score += *m.average_precision;
    }
    if (keep_per_query) report.per_query.push_back(std::move(m));
  }
  if (report.evaluated_queries > 0) {
    const auto n = static_cast<double>(report.evaluated_queries);
    for (auto& [k, v] : report.ndcg_at_k) v /= n;
    report.map_score /= n;
  }
  if (report.total_queries > 0) {
    report.arp = arp_sum / static_cast<double>(report.total_queries);
  }
  return report;
}

MetricReport evaluate(const Ranker& ranker, const Dataset& dataset,
                      std::span<const std::size_t> ks, bool keep_per_query) {
  if (feature_dim(ranker) != dataset.feature_dim) {
    throw std::invalid_argument("model feature dimension " +
                                std::to_string(feature_dim(ranker)) +
                                " does not match dataset dimension " +
                                std::to_string(dataset.feature_dim));
  }
  std::vector<std::vector<double>> scores;
  scores.reserve(dataset.queries.size());
  for (const auto& q : dataset.queries) scores.push_back(score_query(ranker, q));
  return evaluate_scores(dataset, scores, ks, keep_per_query);
}

void write_per_query_csv(const MetricReport& report, std::ostream& out) {
  out << "qid,num_docs,num_relevant";
  for (const auto& [k, v] : report.ndcg_at_k) out << ",ndcg@" << k;
  out << ",average_precision,arp\n";
  for (const auto& m : report.per_query) {
    out << m.qid << ',' << m.num_docs << ',' << m.num_relevant;
    for (const auto& [k, v] : report.ndcg_at_k) {
      out << ',';
      if (auto it = m.ndcg.find(k); it != m.ndcg.end()) out << it->second;
    }
    out << ',';
    if (m.average_precision) out << *m.average_precision;
    out << ',' << m.arp << '\n';
  }
}

}  // namespace prsrank
