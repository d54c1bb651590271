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

#include "prsrank/ranker.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace prsrank {
namespace {

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

[[noreturn]] void bad_model(const std::string& what) {
  throw std::runtime_error("malformed model: " + what);
}

}  // namespace

double LinearRanker::score(std::span<const double> features) const {
  if (features.size() != weights.size()) {
    throw std::invalid_argument("feature dimension does not match linear ranker");
  }
  return std::inner_product(weights.begin(), weights.end(), features.begin(), 0.0);
}

double RegressionTree::predict(std::span<const double> features) const {
  if (nodes.empty()) return 0.0;
  std::size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& n = nodes[node];
    node = static_cast<std::size_t>(
        features[static_cast<std::size_t>(n.split_feature)] <= n.threshold ? n.left
                                                                            : n.right);
  }
  return nodes[node].leaf_value;
}

std::size_t RegressionTree::num_leaves() const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

double GBDTRanker::score(std::span<const double> features) const {
  if (features.size() != feature_dim) {
    throw std::invalid_argument("feature dimension does not match tree ranker");
  }
  double total = 0.0;
  for (const auto& tree : trees) total += learning_rate * tree.predict(features);
  return total;
}

std::size_t feature_dim(const Ranker& ranker) {
  return std::visit(
      [](const auto& r) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, LinearRanker>) {
          return r.weights.size();
        } else {
          return r.feature_dim;
        }
      },
      ranker);
}

double score_document(const Ranker& ranker, std::span<const double> features) {
  return std::visit([&](const auto& r) { return r.score(features); }, ranker);
}

std::vector<double> score_query(const Ranker& ranker, const QueryGroup& query) {
  std::vector<double> scores;
  scores.reserve(query.docs.size());
  for (const auto& doc : query.docs) {
    scores.push_back(score_document(ranker, doc.features));
  }
  return scores;
}

std::vector<std::size_t> rank_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

void save_ranker(const Ranker& ranker, std::ostream& out) {
  if (const auto* linear = std::get_if<LinearRanker>(&ranker)) {
    out << "prsrank-model v1 linear " << linear->weights.size() << '\n';
    for (std::size_t i = 0; i < linear->weights.size(); ++i) {
      out << (i ? " " : "") << format_double(linear->weights[i]);
    }
    out << '\n';
    return;
  }
  const auto& gbdt = std::get<GBDTRanker>(ranker);
  out << "prsrank-model v1 gbdt " << gbdt.feature_dim << ' ' << gbdt.trees.size()
      << ' ' << format_double(gbdt.learning_rate) << ' '
      << format_double(gbdt.sigma) << '\n';
  for (const auto& tree : gbdt.trees) {
    out << "tree " << tree.nodes.size() << '\n';
    for (const auto& n : tree.nodes) {
      out << n.split_feature << ' ' << format_double(n.threshold) << ' ' << n.left
          << ' ' << n.right << ' ' << format_double(n.leaf_value) << '\n';
    }
  }
}

void save_ranker(const Ranker& ranker, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_ranker(ranker, out);
}

Ranker load_ranker(std::istream& in) {
  std::string magic, version, kind;
  if (!(in >> magic >> version >> kind) || magic != "prsrank-model") {
    bad_model("missing header");
  }
  if (version != "v1") bad_model("unsupported version " + version);
  if (kind == "linear") {
    std::size_t dim = 0;
    if (!(in >> dim)) bad_model("missing dimension");
    LinearRanker linear;
    linear.weights.resize(dim);
    for (auto& w : linear.weights) {
      if (!(in >> w)) bad_model("truncated weight list");
    }
    return linear;
  }
  if (kind != "gbdt") bad_model("unknown model kind " + kind);

  GBDTRanker gbdt;
  std::size_t num_trees = 0;
  if (!(in >> gbdt.feature_dim >> num_trees >> gbdt.learning_rate >> gbdt.sigma)) {
    bad_model("bad gbdt header");
  }
  gbdt.trees.resize(num_trees);
  for (auto& tree : gbdt.trees) {
    std::string tag;
    std::size_t num_nodes = 0;
    if (!(in >> tag >> num_nodes) || tag != "tree") bad_model("bad tree header");
    tree.nodes.resize(num_nodes);
    for (auto& n : tree.nodes) {
      if (!(in >> n.split_feature >> n.threshold >> n.left >> n.right >> n.leaf_value)) {
        bad_model("truncated tree");
      }
    }
    for (const auto& n : tree.nodes) {
      if (n.is_leaf()) continue;
      const auto size = static_cast<int>(num_nodes);
      if (n.split_feature >= static_cast<int>(gbdt.feature_dim) || n.left <= 0 ||
          n.right <= 0 || n.left >= size || n.right >= size ||
          !std::isfinite(n.threshold)) {
        bad_model("invalid split node");
      }
    }
  }
  return gbdt;
}

Ranker load_ranker(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_ranker(in);
}

}  // namespace prsrank
