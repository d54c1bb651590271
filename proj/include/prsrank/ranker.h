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

#ifndef PRSRANK_RANKER_H_
#define PRSRANK_RANKER_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "prsrank/data.h"

namespace prsrank {

// score(doc) = dot(weights, features).
struct LinearRanker {
  std::vector<double> weights;
  double l2_lambda = 0.0;

  double score(std::span<const double> features) const;
  friend bool operator==(const LinearRanker&, const LinearRanker&) = default;
};

struct TreeNode {
  // -1 marks a leaf.
  int split_feature = -1;
  double threshold = 0.0;
  // Child indices into RegressionTree::nodes; rows with
  // feature <= threshold go left.
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;

  bool is_leaf() const { return split_feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Nodes are stored in preorder; nodes[0] is the root.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> features) const;
  std::size_t num_leaves() const;
  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct GBDTRanker {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double sigma = 1.0;
  std::size_t feature_dim = 0;

  double score(std::span<const double> features) const;
  friend bool operator==(const GBDTRanker&, const GBDTRanker&) = default;
};

using Ranker = std::variant<LinearRanker, GBDTRanker>;

std::size_t feature_dim(const Ranker& ranker);
double score_document(const Ranker& ranker, std::span<const double> features);
std::vector<double> score_query(const Ranker& ranker, const QueryGroup& query);

// Indices sorted by descending score; ties keep the lower document index
// first.
std::vector<std::size_t> rank_order(std::span<const double> scores);

// Versioned text format:
//   prsrank-model v1 linear <dim>
//   <w_1> ... <w_dim>
// or
//   prsrank-model v1 gbdt <dim> <num_trees> <learning_rate> <sigma>
//   tree <num_nodes>
//   <split_feature> <threshold> <left> <right> <leaf_value>   (preorder)
void save_ranker(const Ranker& ranker, std::ostream& out);
void save_ranker(const Ranker& ranker, const std::filesystem::path& path);
Ranker load_ranker(std::istream& in);
Ranker load_ranker(const std::filesystem::path& path);

}  // namespace prsrank

#endif  // PRSRANK_RANKER_H_
