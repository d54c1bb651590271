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

#ifndef PRSRANK_EXPERIMENT_H_
#define PRSRANK_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prsrank/data.h"
#include "prsrank/learn.h"
#include "prsrank/metrics.h"
#include "prsrank/propensity_est.h"
#include "prsrank/ranker.h"
#include "prsrank/simulate.h"
#include "prsrank/weighting.h"

namespace prsrank {

enum class Learner { kLogReg, kLambdaMart };
enum class PropensitySource { kTrue, kEstimated, kMisspecified };

std::string_view to_string(Learner learner);
std::string_view to_string(PropensitySource source);
Learner parse_learner(std::string_view name);
PropensitySource parse_propensity_source(std::string_view name);

struct ExperimentConfig {
  std::string dataset_name = "synthetic";
  // Benchmark files; when train_path is empty a synthetic corpus is drawn.
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  SyntheticCorpusSpec synthetic;
  std::size_t synthetic_test_queries = 500;
  std::uint64_t data_seed = 7;
  // Negative: pick from the grade range.
  int binarization_threshold = -1;
  double production_fraction = 0.01;

  std::vector<double> etas = {1.0};
  std::vector<double> mus = {0.1};
  std::vector<std::size_t> click_counts = {128000};
  std::vector<SchemeKind> schemes = {SchemeKind::kNaive, SchemeKind::kIps,
                                     SchemeKind::kPns, SchemeKind::kPrs};
  std::vector<PairStrategy> strategies = {PairStrategy::kClickedVsNonClicked};
  std::vector<Learner> learners = {Learner::kLogReg};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  LogRegConfig logreg;
  LambdaMartConfig lambdamart;
  LogRegConfig production;
  double logreg_gamma = 1.0;
  double lambdamart_gamma = std::numeric_limits<double>::infinity();
  double clip_inverse = std::numeric_limits<double>::infinity();

  PropensitySource propensity_source = PropensitySource::kTrue;
  // Used by the misspecified source: weights use these etas while clicks
  // follow the true eta of the cell.
  std::vector<double> assumed_etas = {1.0};
  // Used by the estimated source; eta, mu and seed come from the cell.
  std::size_t swap_sessions = 200000;
  std::size_t swap_depth = 5;

  std::vector<std::size_t> ks = {5, 10};
  std::size_t threads = 1;
  // Adds production-ranker and full-information rows per seed.
  bool include_baselines = false;
  // Zero wall_seconds so that reruns are byte-identical.
  bool record_timing = true;

  // Throws std::invalid_argument on empty grids or out-of-range values.
  void validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& config);

struct ResultRow {
  std::string dataset;
  std::string learner;
  std::string scheme;
  std::string strategy;
  double eta = 0.0;
  double eta_assumed = 0.0;
  double mu = 0.0;
  std::size_t n_clicks = 0;
  std::uint64_t seed = 0;
  std::vector<double> ndcg;  // aligned to ExperimentConfig::ks
  double map_score = 0.0;
  double arp = 0.0;
  double wall_seconds = 0.0;
  // "true", "estimated" or "misspecified"; last CSV column.
  std::string propensity = "true";
};

struct SummaryRow {
  ResultRow key;  // metrics hold the means; seed unused
  std::size_t runs = 0;
  std::vector<double> ndcg_std;
  double map_std = 0.0;
  double arp_std = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> errors;
};

// Train and test slices after binarization. Synthetic corpora draw the test
// slice from an independent stream.
struct ExperimentData {
  Dataset train;
  Dataset test;
};
ExperimentData load_experiment_data(const ExperimentConfig& config);

// Runs every (eta, mu, clicks, seed) cell. Inside a cell one click log is
// shared by all learners, schemes, strategies and assumed etas. A failing
// cell is reported in `errors` and the others still run. Rows come back in
// grid order regardless of the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentData& data);

// Mean and sample standard deviation over seeds, per cell.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

void write_results_csv(const std::vector<ResultRow>& rows, std::span<const std::size_t> ks,
                       std::ostream& out, bool timestamp_header);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::span<const std::size_t> ks,
                       std::ostream& out);

// Trains one ranker from a click log.
Ranker train_ranker(const ClickLog& log, const Dataset& train, Learner learner,
                    const WeightScheme& scheme, PairStrategy strategy,
                    const LogRegConfig& logreg, const LambdaMartConfig& lambdamart);

// Loads a saved ranker and evaluates it; throws on dimension mismatch.
MetricReport evaluate_model(const std::filesystem::path& model_path, const Dataset& test,
                            std::span<const std::size_t> ks, bool keep_per_query = false);

// Deterministic 64-bit seed from a base seed and a list of values.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<double> values);

}  // namespace prsrank

#endif  // PRSRANK_EXPERIMENT_H_
