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

#ifndef PRSRANK_DATA_H_
#define PRSRANK_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prsrank {

// Raised for malformed SVMLight input. `line()` is 1-based; 0 when the error
// is not tied to a specific line (e.g. an empty file).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error(message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct GradedDocument {
  std::vector<double> features;
  int graded_label = 0;
};

struct QueryGroup {
  std::string qid;
  std::vector<GradedDocument> docs;
  // 1 iff graded_label >= the owning dataset's binarization threshold.
  std::vector<std::uint8_t> binary_relevance;

  std::size_t size() const { return docs.size(); }
  std::size_t num_relevant() const;
};

struct Dataset {
  std::vector<QueryGroup> queries;
  std::size_t feature_dim = 0;
  int binarization_threshold = 1;

  std::size_t num_documents() const;
  int max_grade() const;
  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

// Threshold used when none is given: 3 for five-grade corpora (max label
// >= 3), 1 for three-grade corpora.
int default_binarization_threshold(int max_grade);

// Reads `<label> qid:<id> <fid>:<val> ... [# comment]` lines. Documents are
// grouped by qid in first-appearance order, missing fids are zero-filled and
// feature_dim is the largest fid seen. Relevance is binarized with the
// default threshold for the observed grade range.
Dataset parse_svmlight(const std::filesystem::path& path);
Dataset parse_svmlight(std::istream& in, const std::string& source_name = "<stream>");

// Writes non-zero features only; values use 17 significant digits so that
// parsing the output reproduces the dataset exactly.
void write_svmlight(const Dataset& dataset, std::ostream& out);
void write_svmlight(const Dataset& dataset, const std::filesystem::path& path);

Dataset binarize(Dataset dataset, int threshold);

struct ProductionSplit {
  Dataset production;
  Dataset remainder;
};

// Samples ceil(fraction * |Q|) queries without replacement as the production
// slice. Both slices keep the input's query order.
ProductionSplit split_production(const Dataset& dataset, double fraction,
                                 std::uint64_t seed);

// Keeps only queries whose indices are listed, in the listed order.
Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices);

// Parameters of the synthetic LETOR-like corpus used when no benchmark files
// are available. Each query draws its own document pool; graded labels come
// from a noisy nonlinear utility so that a linear ranker is misspecified.
struct SyntheticCorpusSpec {
  std::size_t num_queries = 1000;
  std::size_t docs_per_query = 30;
  std::size_t feature_dim = 40;
  // Number of leading features that carry relevance signal.
  std::size_t informative_features = 8;
  // Standard deviation of the label noise added to the latent utility.
  double label_noise = 1.0;
  // Weight of tanh(z0 * z1) in the utility.
  double interaction = 1.0;
  // Weight of (z2^2 - 1) / sqrt(2) in the utility.
  double curvature = 1.0;
  // Grade cut points applied to the latent utility (ascending); the number
  // of grades is cut_points.size() + 1.
  std::vector<double> cut_points = {0.0, 0.9, 1.6, 2.3};
};

Dataset make_synthetic_dataset(const SyntheticCorpusSpec& spec, std::uint64_t seed);

}  // namespace prsrank

#endif  // PRSRANK_DATA_H_
