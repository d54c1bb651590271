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
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "prsrank/learn.h"

namespace prsrank {
namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double logistic_complement(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double discount(std::size_t position) {
  return 1.0 / std::log2(static_cast<double>(position) + 2.0);
}

// Feature values quantized to at most max_bins bins per feature. Bin b holds
// values in (upper[b-1], upper[b]].
struct BinnedFeatures {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<std::uint16_t> bins;  // row-major rows x dim
  std::vector<std::vector<double>> upper;
  std::vector<std::vector<double>> lower;  // smallest value seen in each bin
};

BinnedFeatures bin_features(const std::vector<const std::vector<double>*>& rows,
                            std::size_t dim, std::size_t max_bins) {
  BinnedFeatures b;
  b.rows = rows.size();
  b.dim = dim;
  b.bins.resize(b.rows * dim);
  b.upper.resize(dim);
  b.lower.resize(dim);
  std::vector<double> values(b.rows);
  for (std::size_t f = 0; f < dim; ++f) {
    for (std::size_t r = 0; r < b.rows; ++r) values[r] = (*rows[r])[f];
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> unique = sorted;
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    auto& upper = b.upper[f];
    if (unique.size() <= max_bins) {
      upper = unique;
    } else {
      for (std::size_t k = 1; k <= max_bins; ++k) {
        const std::size_t idx = std::min(sorted.size() - 1, k * sorted.size() / max_bins);
        const double edge = k == max_bins ? sorted.back() : sorted[idx];
        if (upper.empty() || edge > upper.back()) upper.push_back(edge);
      }
    }
    auto& lower = b.lower[f];
    lower.assign(upper.size(), std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < b.rows; ++r) {
      const auto bin = static_cast<std::size_t>(
          std::lower_bound(upper.begin(), upper.end(), values[r]) - upper.begin());
      b.bins[r * dim + f] = static_cast<std::uint16_t>(bin);
      lower[bin] = std::min(lower[bin], values[r]);
    }
  }
  return b;
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  std::size_t bin = 0;
};

struct GrowNode {
  std::vector<std::size_t> rows;
  double sum_target = 0.0;
  double sum_hessian = 0.0;
  SplitCandidate best;
  int left = -1;
  int right = -1;
  int split_feature = -1;
  double threshold = 0.0;
  // Per-bin target sums and counts over all features, laid out by
  // TreeGrower::offset_. Released once the node is split.
  std::vector<double> hist_sum;
  std::vector<std::uint32_t> hist_count;
};

class TreeGrower {
 public:
  TreeGrower(const BinnedFeatures& binned, const LambdaMartConfig& config)
      : binned_(binned), config_(config) {
    offset_.push_back(0);
    for (const auto& edges : binned_.upper) offset_.push_back(offset_.back() + edges.size());
  }

  // Grows one tree on targets (negative gradients); returns the tree and
  // writes each row's leaf value into `row_values`.
  RegressionTree grow(std::span<const double> targets, std::span<const double> hessians,
                      std::span<const int> features, std::vector<double>& row_values) {
    nodes_.clear();
    GrowNode root;
    root.rows.resize(binned_.rows);
    std::iota(root.rows.begin(), root.rows.end(), 0);
    summarize(root, targets, hessians);
    build_histogram(root, targets);
    nodes_.push_back(std::move(root));
    find_split(0, features);

    std::vector<int> leaves = {0};
    while (leaves.size() < config_.num_leaves) {
      auto best = std::max_element(leaves.begin(), leaves.end(), [&](int a, int b) {
        return nodes_[a].best.gain < nodes_[b].best.gain;
      });
      if (best == leaves.end() || nodes_[*best].best.feature < 0) break;
      const int parent = *best;
      leaves.erase(best);
      const auto [left, right] = split(parent, targets, hessians);
      find_split(left, features);
      find_split(right, features);
      leaves.push_back(left);
      leaves.push_back(right);
    }

    row_values.assign(binned_.rows, 0.0);
    RegressionTree tree;
    emit(0, tree, row_values);
    return tree;
  }

 private:
  void summarize(GrowNode& node, std::span<const double> targets,
                 std::span<const double> hessians) const {
    node.sum_target = 0.0;
    node.sum_hessian = 0.0;
    for (std::size_t r : node.rows) {
      node.sum_target += targets[r];
      node.sum_hessian += hessians[r];
    }
  }

  void build_histogram(GrowNode& node, std::span<const double> targets) const {
    node.hist_sum.assign(offset_.back(), 0.0);
    node.hist_count.assign(offset_.back(), 0);
    for (std::size_t r : node.rows) {
      const std::uint16_t* row = binned_.bins.data() + r * binned_.dim;
      const double t = targets[r];
      for (std::size_t f = 0; f < binned_.dim; ++f) {
        const std::size_t slot = offset_[f] + row[f];
        node.hist_sum[slot] += t;
        ++node.hist_count[slot];
      }
    }
  }

  // Variance reduction: S_L^2/n_L + S_R^2/n_R - S^2/n.
  void find_split(int index, std::span<const int> features) {
    GrowNode& node = nodes_[static_cast<std::size_t>(index)];
    node.best = SplitCandidate{};
    const std::size_t n = node.rows.size();
    const std::size_t min_leaf = std::max<std::size_t>(1, config_.min_docs_per_leaf);
    if (n < 2 * min_leaf) return;
    const double parent_score = node.sum_target * node.sum_target / static_cast<double>(n);
    for (int f : features) {
      const auto fi = static_cast<std::size_t>(f);
      const std::size_t num_bins = binned_.upper[fi].size();
      if (num_bins < 2) continue;
      const double* bin_sum = node.hist_sum.data() + offset_[fi];
      const std::uint32_t* bin_count = node.hist_count.data() + offset_[fi];
      double left_sum = 0.0;
      std::size_t left_count = 0;
      for (std::size_t bin = 0; bin + 1 < num_bins; ++bin) {
        left_sum += bin_sum[bin];
        left_count += bin_count[bin];
        if (left_count < min_leaf) continue;
        const std::size_t right_count = n - left_count;
        if (right_count < min_leaf) break;
        if (bin_count[bin] == 0) continue;
        const double right_sum = node.sum_target - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(left_count) +
                            right_sum * right_sum / static_cast<double>(right_count) -
                            parent_score;
        if (gain > node.best.gain + 1e-12) node.best = {gain, f, bin};
      }
    }
  }

  std::pair<int, int> split(int index, std::span<const double> targets,
                            std::span<const double> hessians) {
    GrowNode left, right;
    {
      GrowNode& node = nodes_[static_cast<std::size_t>(index)];
      const auto f = static_cast<std::size_t>(node.best.feature);
      for (std::size_t r : node.rows) {
        (binned_.bins[r * binned_.dim + f] <= node.best.bin ? left : right)
            .rows.push_back(r);
      }
      node.split_feature = node.best.feature;
      // Midpoint between the largest value going left and the smallest
      // value going right.
      std::size_t next = node.best.bin + 1;
      while (next < binned_.lower[f].size() && !std::isfinite(binned_.lower[f][next])) {
        ++next;
      }
      const double lo = binned_.upper[f][node.best.bin];
      const double hi = next < binned_.lower[f].size() ? binned_.lower[f][next] : lo;
      node.threshold = 0.5 * (lo + hi);
      node.rows.clear();
      node.rows.shrink_to_fit();
    }
    summarize(left, targets, hessians);
    summarize(right, targets, hessians);
    {
      // Scan the smaller child; the larger one is parent minus smaller.
      GrowNode& parent = nodes_[static_cast<std::size_t>(index)];
      const bool left_small = left.rows.size() <= right.rows.size();
      GrowNode& small = left_small ? left : right;
      GrowNode& large = left_small ? right : left;
      build_histogram(small, targets);
      large.hist_sum = std::move(parent.hist_sum);
      large.hist_count = std::move(parent.hist_count);
      for (std::size_t k = 0; k < large.hist_sum.size(); ++k) {
        large.hist_sum[k] -= small.hist_sum[k];
        large.hist_count[k] -= small.hist_count[k];
      }
      parent.hist_sum = {};
      parent.hist_count = {};
    }
    const int li = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(left));
    const int ri = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(right));
    nodes_[static_cast<std::size_t>(index)].left = li;
    nodes_[static_cast<std::size_t>(index)].right = ri;
    return {li, ri};
  }

  int emit(int index, RegressionTree& tree, std::vector<double>& row_values) const {
    const GrowNode& node = nodes_[static_cast<std::size_t>(index)];
    const int slot = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (node.left < 0) {
      const double value =
          node.sum_target / std::max(node.sum_hessian, config_.min_hessian);
      tree.nodes[static_cast<std::size_t>(slot)].leaf_value = value;
      for (std::size_t r : node.rows) row_values[r] = value;
      return slot;
    }
    const int left = emit(node.left, tree, row_values);
    const int right = emit(node.right, tree, row_values);
    TreeNode& out = tree.nodes[static_cast<std::size_t>(slot)];
    out.split_feature = node.split_feature;
    out.threshold = node.threshold;
    out.left = left;
    out.right = right;
    return slot;
  }

  const BinnedFeatures& binned_;
  const LambdaMartConfig& config_;
  std::vector<std::size_t> offset_;
  std::vector<GrowNode> nodes_;
};

}  // namespace

std::vector<double> swap_ndcg_deltas(const ClickSession& session,
                                     std::span<const TrainingPair> pairs,
                                     std::span<const double> scores) {
  const std::size_t n = session.size();
  if (scores.size() != n) throw std::invalid_argument("scores/session size mismatch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return session.presented[a] < session.presented[b];
  });
  std::vector<std::size_t> position(n);
  for (std::size_t p = 0; p < n; ++p) position[order[p]] = p;

  double idcg = 0.0;
  for (std::size_t k = 0; k < session.num_clicks(); ++k) idcg += discount(k);

  std::vector<double> deltas(pairs.size(), 0.0);
  if (idcg == 0.0) return deltas;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    const double gain_diff = std::abs(static_cast<double>(session.clicks[p.i]) -
                                      static_cast<double>(session.clicks[p.j]));
    deltas[k] = gain_diff *
                std::abs(discount(position[p.i]) - discount(position[p.j])) / idcg;
  }
  return deltas;
}

double lambda_surrogate_loss(std::span<const TrainingPair> pairs,
                             std::span<const double> delta_z,
                             std::span<const double> scores, double sigma) {
  double total = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    total += p.weight * delta_z[k] * softplus(-sigma * (scores[p.i] - scores[p.j]));
  }
  return total;
}

LambdaGradients lambda_gradients(const ClickSession& session,
                                 std::span<const TrainingPair> pairs,
                                 std::span<const double> scores, double sigma) {
  const auto deltas = swap_ndcg_deltas(session, pairs, scores);
  LambdaGradients out{std::vector<double>(session.size(), 0.0),
                      std::vector<double>(session.size(), 0.0)};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    const double scale = p.weight * deltas[k];
    if (scale == 0.0) continue;
    const double rho = logistic_complement(sigma * (scores[p.i] - scores[p.j]));
    const double lambda_ij = -sigma * scale * rho;
    out.lambda[p.i] += lambda_ij;
    out.lambda[p.j] -= lambda_ij;
    const double h = sigma * sigma * scale * rho * (1.0 - rho);
    out.hessian[p.i] += h;
    out.hessian[p.j] += h;
  }
  return out;
}

LambdaGradients query_lambda_gradients(const QueryPairs& pairs,
                                       std::span<const double> doc_scores,
                                       double sigma) {
  const std::size_t n = doc_scores.size();
  const auto order = rank_order(doc_scores);
  std::vector<double> disc(n);
  for (std::size_t p = 0; p < n; ++p) disc[order[p]] = discount(p);

  LambdaGradients out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (const auto& p : pairs.pairs) {
    const double scale = p.ndcg_weight * std::abs(disc[p.doc_i] - disc[p.doc_j]);
    if (scale == 0.0) continue;
    const double rho =
        logistic_complement(sigma * (doc_scores[p.doc_i] - doc_scores[p.doc_j]));
    const double lambda_ij = -sigma * scale * rho;
    out.lambda[p.doc_i] += lambda_ij;
    out.lambda[p.doc_j] -= lambda_ij;
    const double h = sigma * sigma * scale * rho * (1.0 - rho);
    out.hessian[p.doc_i] += h;
    out.hessian[p.doc_j] += h;
  }
  return out;
}

GBDTRanker train_lambdamart_on_pairs(const std::vector<QueryPairs>& pairs,
                                     const Dataset& dataset,
                                     const LambdaMartConfig& config) {
  if (pairs.empty()) throw std::invalid_argument("train_lambdamart: no training pairs");
  GBDTRanker model;
  model.learning_rate = config.learning_rate;
  model.sigma = config.sigma;
  model.feature_dim = dataset.feature_dim;
  if (config.num_trees == 0) return model;

  // Rows are laid out query by query so that each query's scores are a
  // contiguous slice.
  std::vector<const std::vector<double>*> rows;
  std::vector<std::size_t> offsets;
  for (const auto& qp : pairs) {
    offsets.push_back(rows.size());
    for (const auto& doc : dataset.queries.at(qp.query).docs) rows.push_back(&doc.features);
  }
  offsets.push_back(rows.size());

  const BinnedFeatures binned = bin_features(rows, dataset.feature_dim, config.max_bins);
  TreeGrower grower(binned, config);
  std::vector<double> scores(rows.size(), 0.0);
  std::vector<double> targets(rows.size()), hessians(rows.size()), row_values;

  std::vector<int> all_features(dataset.feature_dim);
  std::iota(all_features.begin(), all_features.end(), 0);
  std::mt19937_64 rng(config.seed);
  const auto features_per_tree = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(config.feature_fraction *
                                            static_cast<double>(dataset.feature_dim))));

  for (std::size_t t = 0; t < config.num_trees; ++t) {
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const std::size_t begin = offsets[q];
      const std::size_t end = offsets[q + 1];
      const auto grads = query_lambda_gradients(
          pairs[q], std::span<const double>(scores).subspan(begin, end - begin),
          config.sigma);
      for (std::size_t d = 0; d < end - begin; ++d) {
        targets[begin + d] = -grads.lambda[d];
        hessians[begin + d] = grads.hessian[d];
      }
    }
    std::vector<int> features = all_features;
    if (features_per_tree < features.size()) {
      std::shuffle(features.begin(), features.end(), rng);
      features.resize(features_per_tree);
      std::sort(features.begin(), features.end());
    }
    model.trees.push_back(grower.grow(targets, hessians, features, row_values));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      scores[r] += config.learning_rate * row_values[r];
    }
  }
  return model;
}

GBDTRanker train_lambdamart(const ClickLog& log, const Dataset& dataset,
                            const WeightScheme& scheme, const LambdaMartConfig& config) {
  const auto pairs =
      aggregate_pairs(log, dataset, PairStrategy::kClickedVsNonClicked, scheme);
  return train_lambdamart_on_pairs(pairs, dataset, config);
}

}  // namespace prsrank
