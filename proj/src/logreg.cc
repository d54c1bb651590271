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

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "prsrank/learn.h"

namespace prsrank {
namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// 1 / (1 + exp(x)).
double logistic_complement(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double ideal_dcg(std::size_t num_clicks) {
  double total = 0.0;
  for (std::size_t k = 0; k < num_clicks; ++k) {
    total += 1.0 / std::log2(static_cast<double>(k) + 2.0);
  }
  return total;
}

// Pairs stored as row indices into a document matrix, so that one step costs
// one score per document plus one sigmoid per pair.
struct PairProblem {
  std::size_t dim = 0;
  std::vector<double> features;  // row-major, one row per document
  struct Pair {
    std::size_t row_i, row_j;
    double weight;
  };
  std::vector<Pair> pairs;
  // Per query with pairs: [row begin, row end) and [pair begin, pair end).
  struct Range {
    std::size_t row_begin, row_end, pair_begin, pair_end;
  };
  std::vector<Range> queries;
  double total_weight = 0.0;

  std::size_t rows() const { return dim == 0 ? 0 : features.size() / dim; }
};

PairProblem build_pair_problem(const std::vector<QueryPairs>& pairs, const Dataset& dataset) {
  PairProblem m;
  m.dim = dataset.feature_dim;
  for (const auto& qp : pairs) {
    const QueryGroup& query = dataset.queries.at(qp.query);
    const std::size_t row0 = m.rows();
    const std::size_t pair0 = m.pairs.size();
    for (const auto& p : qp.pairs) {
      if (p.weight <= 0.0) continue;
      m.pairs.push_back({row0 + p.doc_i, row0 + p.doc_j, p.weight});
      m.total_weight += p.weight;
    }
    if (m.pairs.size() == pair0) continue;
    for (const auto& doc : query.docs) {
      m.features.insert(m.features.end(), doc.features.begin(), doc.features.end());
    }
    m.queries.push_back({row0, m.rows(), pair0, m.pairs.size()});
  }
  return m;
}

void score_rows(const PairProblem& m, std::size_t begin, std::size_t end,
                std::span<const double> w, std::vector<double>& scores) {
  for (std::size_t r = begin; r < end; ++r) {
    const double* x = m.features.data() + r * m.dim;
    double s = 0.0;
    for (std::size_t f = 0; f < m.dim; ++f) s += w[f] * x[f];
    scores[r] = s;
  }
}

double problem_objective(const PairProblem& m, std::span<const double> w, double l2_lambda) {
  std::vector<double> scores(m.rows());
  score_rows(m, 0, m.rows(), w, scores);
  double loss = 0.0;
  for (const auto& p : m.pairs) loss += p.weight * softplus(-(scores[p.row_i] - scores[p.row_j]));
  const double norm = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  return loss / m.total_weight + 0.5 * l2_lambda * norm;
}

}  // namespace

double pairwise_logistic_loss(double score_i, double score_j, double weight) {
  return weight * softplus(-(score_i - score_j));
}

std::vector<double> logistic_gradient(std::span<const double> features_i,
                                      std::span<const double> features_j,
                                      std::span<const double> weights,
                                      double weight) {
  if (features_i.size() != weights.size() || features_j.size() != weights.size()) {
    throw std::invalid_argument("logistic_gradient: dimension mismatch");
  }
  const std::size_t dim = weights.size();
  double diff_score = 0.0;
  for (std::size_t f = 0; f < dim; ++f) {
    diff_score += weights[f] * (features_i[f] - features_j[f]);
  }
  const double s = logistic_complement(diff_score);
  std::vector<double> grad(dim);
  for (std::size_t f = 0; f < dim; ++f) {
    grad[f] = -weight * s * (features_i[f] - features_j[f]);
  }
  return grad;
}

std::vector<QueryPairs> aggregate_pairs(const ClickLog& log, const Dataset& dataset,
                                        PairStrategy strategy,
                                        const WeightScheme& scheme) {
  std::unordered_map<std::string, std::size_t> query_of;
  for (std::size_t q = 0; q < dataset.queries.size(); ++q) {
    query_of.emplace(dataset.queries[q].qid, q);
  }

  struct Accumulator {
    std::unordered_map<std::uint64_t, std::size_t> slot;
    std::vector<AggregatedPair> pairs;
  };
  std::unordered_map<std::size_t, Accumulator> per_query;
  std::vector<std::size_t> first_seen;

  for (std::size_t s = 0; s < log.sessions.size(); ++s) {
    const ClickSession& session = log.sessions[s];
    const std::size_t clicks = session.num_clicks();
    if (clicks == 0) continue;
    const auto it = query_of.find(session.qid);
    if (it == query_of.end()) {
      throw std::invalid_argument("click log references unknown qid '" +
                                  session.qid + "'");
    }
    const std::size_t q = it->second;
    const std::size_t n = dataset.queries[q].size();
    for (std::size_t d : session.presented) {
      if (d >= n) throw std::invalid_argument("click log doc index out of range");
    }
    const double idcg = ideal_dcg(clicks);
    auto [acc_it, inserted] = per_query.try_emplace(q);
    if (inserted) first_seen.push_back(q);
    Accumulator& acc = acc_it->second;
    for (const TrainingPair& tp : generate_pairs(session, strategy, scheme, s)) {
      const std::size_t di = session.presented[tp.i];
      const std::size_t dj = session.presented[tp.j];
      const std::uint64_t key = static_cast<std::uint64_t>(di) * n + dj;
      auto [slot_it, fresh] = acc.slot.try_emplace(key, acc.pairs.size());
      if (fresh) acc.pairs.push_back({di, dj, 0.0, 0.0});
      AggregatedPair& ap = acc.pairs[slot_it->second];
      ap.weight += tp.weight;
      // Gains are click bits, so click-click pairs carry no swap delta.
      if (session.clicks[tp.i] != session.clicks[tp.j]) ap.ndcg_weight += tp.weight / idcg;
    }
  }

  std::sort(first_seen.begin(), first_seen.end());
  std::vector<QueryPairs> out;
  for (std::size_t q : first_seen) {
    auto& acc = per_query[q];
    if (acc.pairs.empty()) continue;
    std::sort(acc.pairs.begin(), acc.pairs.end(),
              [](const AggregatedPair& a, const AggregatedPair& b) {
                return a.doc_i != b.doc_i ? a.doc_i < b.doc_i : a.doc_j < b.doc_j;
              });
    out.push_back({q, std::move(acc.pairs)});
  }
  return out;
}

std::vector<QueryPairs> full_information_pairs(const Dataset& dataset) {
  std::vector<QueryPairs> out;
  for (std::size_t q = 0; q < dataset.queries.size(); ++q) {
    const auto& docs = dataset.queries[q].docs;
    QueryPairs qp{q, {}};
    for (std::size_t i = 0; i < docs.size(); ++i) {
      for (std::size_t j = 0; j < docs.size(); ++j) {
        if (docs[i].graded_label > docs[j].graded_label) {
          qp.pairs.push_back({i, j, 1.0, 0.0});
        }
      }
    }
    if (!qp.pairs.empty()) out.push_back(std::move(qp));
  }
  return out;
}

double logreg_objective(const std::vector<QueryPairs>& pairs, const Dataset& dataset,
                        std::span<const double> weights, double l2_lambda) {
  const PairProblem m = build_pair_problem(pairs, dataset);
  if (m.pairs.empty()) throw std::invalid_argument("no pairs");
  if (weights.size() != m.dim) throw std::invalid_argument("weight dimension mismatch");
  return problem_objective(m, weights, l2_lambda);
}

LinearRanker train_logreg_on_pairs(const std::vector<QueryPairs>& pairs,
                                   const Dataset& dataset, const LogRegConfig& config,
                                   std::vector<double>* objective_history) {
  const PairProblem m = build_pair_problem(pairs, dataset);
  if (m.pairs.empty()) {
    throw std::invalid_argument("train_logreg: no training pairs");
  }
  const std::size_t dim = m.dim;
  LinearRanker ranker;
  ranker.weights.assign(dim, 0.0);
  ranker.l2_lambda = config.l2_lambda;

  std::vector<std::size_t> query_order(m.queries.size());
  std::iota(query_order.begin(), query_order.end(), 0);
  const std::size_t batch = config.batch_queries == 0
                                ? query_order.size()
                                : std::min(config.batch_queries, query_order.size());
  std::mt19937_64 rng(config.seed);
  std::vector<double> grad(dim);
  std::vector<double> scores(m.rows(), 0.0);
  std::vector<double> coef(m.rows(), 0.0);
  auto& w = ranker.weights;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (batch < query_order.size()) std::shuffle(query_order.begin(), query_order.end(), rng);
    const double step =
        config.learning_rate / (1.0 + config.step_decay * static_cast<double>(epoch));
    for (std::size_t start = 0; start < query_order.size(); start += batch) {
      const std::size_t stop = std::min(start + batch, query_order.size());
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_weight = 0.0;
      for (std::size_t b = start; b < stop; ++b) {
        const auto& q = m.queries[query_order[b]];
        score_rows(m, q.row_begin, q.row_end, w, scores);
        std::fill(coef.begin() + static_cast<std::ptrdiff_t>(q.row_begin),
                  coef.begin() + static_cast<std::ptrdiff_t>(q.row_end), 0.0);
        for (std::size_t p = q.pair_begin; p < q.pair_end; ++p) {
          const auto& pr = m.pairs[p];
          const double c =
              -pr.weight * logistic_complement(scores[pr.row_i] - scores[pr.row_j]);
          coef[pr.row_i] += c;
          coef[pr.row_j] -= c;
          batch_weight += pr.weight;
        }
        for (std::size_t r = q.row_begin; r < q.row_end; ++r) {
          if (coef[r] == 0.0) continue;
          const double* x = m.features.data() + r * dim;
          for (std::size_t f = 0; f < dim; ++f) grad[f] += coef[r] * x[f];
        }
      }
      for (std::size_t f = 0; f < dim; ++f) {
        w[f] -= step * (grad[f] / batch_weight + config.l2_lambda * w[f]);
      }
    }
    if (objective_history) {
      objective_history->push_back(problem_objective(m, w, config.l2_lambda));
    }
  }
  return ranker;
}

LinearRanker train_logreg(const ClickLog& log, const Dataset& dataset,
                          PairStrategy strategy, const WeightScheme& scheme,
                          const LogRegConfig& config,
                          std::vector<double>* objective_history) {
  const auto pairs = aggregate_pairs(log, dataset, strategy, scheme);
  return train_logreg_on_pairs(pairs, dataset, config, objective_history);
}

LinearRanker train_logreg_full_info(const Dataset& dataset, const LogRegConfig& config) {
  const auto pairs = full_information_pairs(dataset);
  if (pairs.empty()) {
    std::cerr << "warning: no discordant pairs; returning a zero-weight ranker\n";
    LinearRanker zero;
    zero.weights.assign(dataset.feature_dim, 0.0);
    zero.l2_lambda = config.l2_lambda;
    return zero;
  }
  return train_logreg_on_pairs(pairs, dataset, config);
}

}  // namespace prsrank
