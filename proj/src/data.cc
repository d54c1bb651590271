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

#include "prsrank/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string_view>
#include <unordered_map>

namespace prsrank {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t line_no,
                       const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line_no) + ": " + what,
                   line_no);
}

bool parse_double(std::string_view token, double& out) {
  // std::from_chars for double is available in libstdc++ 11.
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_size(std::string_view token, std::size_t& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

struct ParsedLine {
  int label;
  std::string qid;
  std::vector<std::pair<std::size_t, double>> features;
};

ParsedLine parse_line(std::string_view line, const std::string& source,
                      std::size_t line_no) {
  ParsedLine parsed;
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  if (tokens.size() < 2) fail(source, line_no, "expected '<label> qid:<id> ...'");

  double label = 0.0;
  if (!parse_double(tokens[0], label) || label < 0.0 ||
      label != std::floor(label) || label > 1e6) {
    fail(source, line_no, "invalid label '" + std::string(tokens[0]) + "'");
  }
  parsed.label = static_cast<int>(label);

  if (tokens[1].substr(0, 4) != "qid:" || tokens[1].size() == 4) {
    fail(source, line_no, "missing qid field");
  }
  parsed.qid = std::string(tokens[1].substr(4));

  std::size_t previous_fid = 0;
  for (std::size_t t = 2; t < tokens.size(); ++t) {
    const auto colon = tokens[t].find(':');
    if (colon == std::string_view::npos) {
      fail(source, line_no, "malformed feature '" + std::string(tokens[t]) + "'");
    }
    std::size_t fid = 0;
    double value = 0.0;
    if (!parse_size(tokens[t].substr(0, colon), fid) || fid == 0) {
      fail(source, line_no, "invalid feature id in '" + std::string(tokens[t]) + "'");
    }
    if (!parse_double(tokens[t].substr(colon + 1), value)) {
      fail(source, line_no, "invalid feature value in '" + std::string(tokens[t]) + "'");
    }
    if (fid <= previous_fid) {
      fail(source, line_no, "feature ids must be strictly increasing");
    }
    previous_fid = fid;
    parsed.features.emplace_back(fid, value);
  }
  return parsed;
}

}  // namespace

std::size_t QueryGroup::num_relevant() const {
  return static_cast<std::size_t>(
      std::count(binary_relevance.begin(), binary_relevance.end(), 1));
}

std::size_t Dataset::num_documents() const {
  std::size_t total = 0;
  for (const auto& q : queries) total += q.docs.size();
  return total;
}

int Dataset::max_grade() const {
  int grade = 0;
  for (const auto& q : queries) {
    for (const auto& d : q.docs) grade = std::max(grade, d.graded_label);
  }
  return grade;
}

void Dataset::validate() const {
  std::unordered_map<std::string, int> seen;
  for (const auto& q : queries) {
    if (!seen.emplace(q.qid, 0).second) {
      throw std::invalid_argument("duplicate qid '" + q.qid + "'");
    }
    if (q.binary_relevance.size() != q.docs.size()) {
      throw std::invalid_argument("relevance length mismatch in query " + q.qid);
    }
    for (std::size_t i = 0; i < q.docs.size(); ++i) {
      if (q.docs[i].features.size() != feature_dim) {
        throw std::invalid_argument("feature dimension mismatch in query " + q.qid);
      }
      const bool relevant = q.docs[i].graded_label >= binarization_threshold;
      if (relevant != (q.binary_relevance[i] == 1)) {
        throw std::invalid_argument("binary relevance out of sync in query " + q.qid);
      }
    }
  }
}

int default_binarization_threshold(int max_grade) {
  return max_grade >= 3 ? 3 : 1;
}

Dataset parse_svmlight(std::istream& in, const std::string& source_name) {
  Dataset dataset;
  std::unordered_map<std::string, std::size_t> query_index;
  std::vector<std::vector<std::pair<std::size_t, double>>> sparse_rows;
  std::vector<std::pair<std::size_t, std::size_t>> row_location;

  std::string raw;
  std::size_t line_no = 0;
  std::size_t max_fid = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    ParsedLine parsed = parse_line(line, source_name, line_no);
    auto [it, inserted] = query_index.emplace(parsed.qid, dataset.queries.size());
    if (inserted) {
      QueryGroup group;
      group.qid = parsed.qid;
      dataset.queries.push_back(std::move(group));
    }
    QueryGroup& group = dataset.queries[it->second];
    GradedDocument doc;
    doc.graded_label = parsed.label;
    group.docs.push_back(std::move(doc));
    if (!parsed.features.empty()) {
      max_fid = std::max(max_fid, parsed.features.back().first);
    }
    row_location.emplace_back(it->second, group.docs.size() - 1);
    sparse_rows.push_back(std::move(parsed.features));
  }
  if (dataset.queries.empty()) {
    throw ParseError(source_name + ": empty dataset", 0);
  }

  dataset.feature_dim = max_fid;
  for (std::size_t r = 0; r < sparse_rows.size(); ++r) {
    auto [qi, di] = row_location[r];
    auto& features = dataset.queries[qi].docs[di].features;
    features.assign(max_fid, 0.0);
    for (const auto& [fid, value] : sparse_rows[r]) features[fid - 1] = value;
  }
  return binarize(std::move(dataset),
                  default_binarization_threshold(dataset.max_grade()));
}

Dataset parse_svmlight(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_svmlight(in, path.string());
}

void write_svmlight(const Dataset& dataset, std::ostream& out) {
  char buffer[64];
  for (const auto& q : dataset.queries) {
    for (const auto& doc : q.docs) {
      out << doc.graded_label << " qid:" << q.qid;
      for (std::size_t f = 0; f < doc.features.size(); ++f) {
        if (doc.features[f] == 0.0) continue;
        std::snprintf(buffer, sizeof(buffer), "%.17g", doc.features[f]);
        out << ' ' << (f + 1) << ':' << buffer;
      }
      out << '\n';
    }
  }
}

void write_svmlight(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_svmlight(dataset, out);
}

Dataset binarize(Dataset dataset, int threshold) {
  dataset.binarization_threshold = threshold;
  for (auto& q : dataset.queries) {
    q.binary_relevance.resize(q.docs.size());
    for (std::size_t i = 0; i < q.docs.size(); ++i) {
      q.binary_relevance[i] = q.docs[i].graded_label >= threshold ? 1 : 0;
    }
  }
  return dataset;
}

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.feature_dim = dataset.feature_dim;
  out.binarization_threshold = dataset.binarization_threshold;
  out.queries.reserve(indices.size());
  for (std::size_t i : indices) out.queries.push_back(dataset.queries.at(i));
  return out;
}

ProductionSplit split_production(const Dataset& dataset, double fraction,
                                 std::uint64_t seed) {
  const std::size_t total = dataset.queries.size();
  if (total < 2) {
    throw std::invalid_argument("split_production needs at least 2 queries");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("production fraction must lie in (0, 1)");
  }
  // The epsilon absorbs representation error such as 0.01 * 100.
  const auto wanted = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(total) - 1e-9));
  if (wanted == 0 || wanted >= total) {
    throw std::invalid_argument("production fraction yields an empty slice");
  }

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> production(order.begin(), order.begin() + wanted);
  std::vector<std::size_t> remainder(order.begin() + wanted, order.end());
  std::sort(production.begin(), production.end());
  std::sort(remainder.begin(), remainder.end());
  return {subset(dataset, production), subset(dataset, remainder)};
}

Dataset make_synthetic_dataset(const SyntheticCorpusSpec& spec, std::uint64_t seed) {
  if (spec.num_queries == 0 || spec.docs_per_query == 0 ||
      spec.feature_dim < spec.informative_features ||
      spec.informative_features < 3) {
    throw std::invalid_argument("invalid synthetic corpus spec");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Fixed utility direction over the informative features with decaying
  // importance, plus a pairwise interaction the linear model cannot express.
  std::vector<double> direction(spec.informative_features);
  for (std::size_t f = 0; f < direction.size(); ++f) {
    direction[f] = 1.0 / (1.0 + 0.5 * static_cast<double>(f));
  }

  Dataset dataset;
  dataset.feature_dim = spec.feature_dim;
  dataset.queries.reserve(spec.num_queries);
  for (std::size_t q = 0; q < spec.num_queries; ++q) {
    QueryGroup group;
    group.qid = std::to_string(q + 1);
    // Query-level shift: documents of one query share a common offset, which
    // leaves within-query ordering untouched but varies label rates.
    std::vector<double> shift(spec.feature_dim);
    for (auto& s : shift) s = 0.5 * normal(rng);
    for (std::size_t d = 0; d < spec.docs_per_query; ++d) {
      GradedDocument doc;
      doc.features.resize(spec.feature_dim);
      for (std::size_t f = 0; f < spec.feature_dim; ++f) {
        doc.features[f] = shift[f] + normal(rng);
      }
      double utility = 0.0;
      for (std::size_t f = 0; f < direction.size(); ++f) {
        utility += direction[f] * (doc.features[f] - shift[f]);
      }
      const double z0 = doc.features[0] - shift[0];
      const double z1 = doc.features[1] - shift[1];
      const double z2 = doc.features[2] - shift[2];
      utility += spec.interaction * std::tanh(z0 * z1);
      utility += spec.curvature * (z2 * z2 - 1.0) / std::sqrt(2.0);
      utility += spec.label_noise * normal(rng);
      int grade = 0;
      for (double cut : spec.cut_points) {
        if (utility > cut) ++grade;
      }
      doc.graded_label = grade;
      group.docs.push_back(std::move(doc));
    }
    dataset.queries.push_back(std::move(group));
  }
  const int max_grade = static_cast<int>(spec.cut_points.size());
  return binarize(std::move(dataset), default_binarization_threshold(max_grade));
}

}  // namespace prsrank
