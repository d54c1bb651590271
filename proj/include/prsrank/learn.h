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

// Pairwise learners trained from weighted click pairs.
//
// Both learners consume the same aggregated pair representation: every
// (query, clicked doc, compared doc) triple appearing in the log is merged
// into one entry whose weight is the sum of its per-session weights. Because
// documents of a query have fixed features, the summed objective is
// identical to the per-session one.

#ifndef PRSRANK_LEARN_H_
#define PRSRANK_LEARN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "prsrank/data.h"
#include "prsrank/ranker.h"
#include "prsrank/simulate.h"
#include "prsrank/weighting.h"

namespace prsrank {

struct LogRegConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.2;
  double l2_lambda = 1e-4;
  // Queries per mini-batch; 0 uses every query in each step.
  std::size_t batch_queries = 0;
  // Step at epoch t is learning_rate / (1 + step_decay * t).
  double step_decay = 0.0;
  std::uint64_t seed = 0;
};

struct LambdaMartConfig {
  std::size_t num_trees = 300;
  std::size_t num_leaves = 31;
  double learning_rate = 0.1;
  std::size_t min_docs_per_leaf = 1;
  double sigma = 1.0;
  // Floor on the summed hessian of a leaf.
  double min_hessian = 1e-9;
  // Fraction of features considered per tree, sampled with `seed`.
  double feature_fraction = 1.0;
  std::size_t max_bins = 255;
  std::uint64_t seed = 0;
};

// weight * log(1 + exp(-(score_i - score_j))), stable for large margins.
double pairwise_logistic_loss(double score_i, double score_j, double weight);

// Gradient of pairwise_logistic_loss with respect to the linear weights.
std::vector<double> logistic_gradient(std::span<const double> features_i,
                                      std::span<const double> features_j,
                                      std::span<const double> weights,
                                      double weight);

struct AggregatedPair {
  std::size_t doc_i = 0;  // preferred document, index within the query
  std::size_t doc_j = 0;
  // Sum of scheme weights over sessions.
  double weight = 0.0;
  // Sum over sessions of scheme weight / ideal DCG of the session's clicks;
  // the NDCG swap delta is this times the discount difference.
  double ndcg_weight = 0.0;
};

struct QueryPairs {
  std::size_t query = 0;  // index into the dataset
  std::vector<AggregatedPair> pairs;
};

// Pairs of every session with at least one click, merged per query. Throws
// when a session's qid is missing from `dataset`.
std::vector<QueryPairs> aggregate_pairs(const ClickLog& log, const Dataset& dataset,
                                        PairStrategy strategy,
                                        const WeightScheme& scheme);

// Pairs (i, j) with graded_label_i > graded_label_j, unit weight.
std::vector<QueryPairs> full_information_pairs(const Dataset& dataset);

// Mean weighted logistic loss (normalized by the total pair weight) plus
// (l2_lambda / 2) * ||w||^2.
double logreg_objective(const std::vector<QueryPairs>& pairs, const Dataset& dataset,
                        std::span<const double> weights, double l2_lambda);

LinearRanker train_logreg_on_pairs(const std::vector<QueryPairs>& pairs,
                                   const Dataset& dataset, const LogRegConfig& config,
                                   std::vector<double>* objective_history = nullptr);

// Minimizes the weighted pairwise logistic loss over the log's pairs. Throws
// std::invalid_argument when the log yields no pairs.
LinearRanker train_logreg(const ClickLog& log, const Dataset& dataset,
                          PairStrategy strategy, const WeightScheme& scheme,
                          const LogRegConfig& config,
                          std::vector<double>* objective_history = nullptr);

// Full-information variant on graded labels. Warns and returns zero weights
// when there is no discordant pair.
LinearRanker train_logreg_full_info(const Dataset& dataset, const LogRegConfig& config);

// Per-document LambdaRank gradients. `lambda` is the derivative of the
// surrogate loss with respect to each score, so descent moves scores by
// -lambda / hessian.
struct LambdaGradients {
  std::vector<double> lambda;
  std::vector<double> hessian;
};

// |Delta NDCG| for swapping each pair in the ordering induced by `scores`,
// using click bits as gains. Ties in `scores` are broken by document index
// (session.presented). Aligned to `pairs`.
std::vector<double> swap_ndcg_deltas(const ClickSession& session,
                                     std::span<const TrainingPair> pairs,
                                     std::span<const double> scores);

// Smoothed objective whose derivative is the lambda gradient when the swap
// deltas are held fixed:
//   sum_pairs weight * |dZ| * log(1 + exp(-sigma (s_i - s_j))).
double lambda_surrogate_loss(std::span<const TrainingPair> pairs,
                             std::span<const double> delta_z,
                             std::span<const double> scores, double sigma);

// Gradients for one session; `scores` aligned to presented order.
LambdaGradients lambda_gradients(const ClickSession& session,
                                 std::span<const TrainingPair> pairs,
                                 std::span<const double> scores, double sigma);

// Same quantity over a whole query's aggregated pairs; `doc_scores` indexed
// by document.
LambdaGradients query_lambda_gradients(const QueryPairs& pairs,
                                       std::span<const double> doc_scores,
                                       double sigma);

GBDTRanker train_lambdamart_on_pairs(const std::vector<QueryPairs>& pairs,
                                     const Dataset& dataset,
                                     const LambdaMartConfig& config);

// Boosted trees on lambdas from clicked vs non-clicked pairs weighted by
// `scheme`. Throws std::invalid_argument when the log yields no pairs.
GBDTRanker train_lambdamart(const ClickLog& log, const Dataset& dataset,
                            const WeightScheme& scheme, const LambdaMartConfig& config);

}  // namespace prsrank

#endif  // PRSRANK_LEARN_H_
