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

#include "prsrank/experiment.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "json.hpp"

namespace prsrank {
namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stream tags so that clicks, swaps, splits and training draw unrelated seeds.
constexpr double kTagSplit = 1.0;
constexpr double kTagClicks = 2.0;
constexpr double kTagSwap = 3.0;
constexpr double kTagTrain = 4.0;
constexpr double kTagTest = 5.0;

// ---- JSON helpers ----

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
    }
  }
}

double as_real(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (v.is_string()) {
    const std::string s = lower(v.get<std::string>());
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  return v.get<double>();
}

json real_to_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_real(const json& obj, const char* key, double& out) {
  if (obj.contains(key)) out = as_real(obj.at(key));
}

void read_logreg(const json& j, LogRegConfig& c, const std::string& where) {
  reject_unknown(j, {"epochs", "learning_rate", "l2_lambda", "batch_queries", "step_decay"},
                 where);
  read(j, "epochs", c.epochs);
  read_real(j, "learning_rate", c.learning_rate);
  read_real(j, "l2_lambda", c.l2_lambda);
  read(j, "batch_queries", c.batch_queries);
  read_real(j, "step_decay", c.step_decay);
}

json logreg_to_json(const LogRegConfig& c) {
  return {{"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"l2_lambda", c.l2_lambda},
          {"batch_queries", c.batch_queries},
          {"step_decay", c.step_decay}};
}

// ---- data ----

void pad_features(Dataset& dataset, std::size_t dim) {
  for (auto& q : dataset.queries) {
    for (auto& d : q.docs) d.features.resize(dim, 0.0);
  }
  dataset.feature_dim = dim;
}

// ---- formatting ----

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, x);
  return buf;
}

std::string param(double x) { return std::isinf(x) ? "inf" : fmt("%.10g", x); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct WeightVariant {
  double eta_assumed = 0.0;
  ClickLog log;
};

}  // namespace

std::string_view to_string(Learner learner) {
  return learner == Learner::kLogReg ? "logreg" : "lambdamart";
}

std::string_view to_string(PropensitySource source) {
  switch (source) {
    case PropensitySource::kTrue:
      return "true";
    case PropensitySource::kEstimated:
      return "estimated";
    case PropensitySource::kMisspecified:
      return "misspecified";
  }
  return "?";
}

Learner parse_learner(std::string_view name) {
  const std::string s = lower(name);
  if (s == "logreg" || s == "logistic") return Learner::kLogReg;
  if (s == "lambdamart") return Learner::kLambdaMart;
  throw std::invalid_argument("unknown learner '" + std::string(name) + "'");
}

PropensitySource parse_propensity_source(std::string_view name) {
  const std::string s = lower(name);
  if (s == "true") return PropensitySource::kTrue;
  if (s == "estimated") return PropensitySource::kEstimated;
  if (s == "misspecified") return PropensitySource::kMisspecified;
  throw std::invalid_argument("unknown propensity source '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<double> values) {
  std::uint64_t h = splitmix64(base);
  for (double v : values) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
  return h;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(!etas.empty() && !mus.empty() && !click_counts.empty(), "grids must be nonempty");
  require(!schemes.empty() && !strategies.empty() && !learners.empty(),
          "schemes, strategies and learners must be nonempty");
  require(!seeds.empty(), "at least one seed is required");
  require(!ks.empty(), "at least one cutoff k is required");
  for (std::size_t k : ks) require(k > 0, "cutoffs must be positive");
  require(production_fraction > 0.0 && production_fraction < 1.0,
          "production_fraction must lie in (0, 1)");
  for (double eta : etas) require(eta >= 0.0, "eta must be nonnegative");
  for (double mu : mus) require(mu >= 0.0 && mu < 0.5, "mu must lie in [0, 0.5)");
  for (std::size_t n : click_counts) require(n > 0, "click counts must be positive");
  require(logreg_gamma > 0.0 && lambdamart_gamma > 0.0 && clip_inverse > 0.0,
          "clipping thresholds must be positive");
  if (propensity_source == PropensitySource::kMisspecified) {
    require(!assumed_etas.empty(), "misspecified mode needs assumed_etas");
    for (double eta : assumed_etas) require(eta >= 0.0, "assumed eta must be nonnegative");
  }
  if (propensity_source == PropensitySource::kEstimated) {
    require(swap_depth >= 2 && swap_sessions > 0, "swap experiment needs depth >= 2");
  }
  require(threads >= 1, "threads must be >= 1");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  reject_unknown(j,
                 {"dataset_name", "train_path", "test_path", "synthetic",
                  "synthetic_test_queries", "data_seed", "binarization_threshold",
                  "production_fraction", "etas", "mus", "click_counts", "schemes",
                  "strategies", "learners", "seeds", "logreg", "lambdamart", "production",
                  "logreg_gamma", "lambdamart_gamma", "clip_inverse", "propensity_source",
                  "assumed_etas", "swap_sessions", "swap_depth", "ks", "threads",
                  "include_baselines", "record_timing"},
                 "config");
  ExperimentConfig c;
  read(j, "dataset_name", c.dataset_name);
  if (j.contains("train_path")) c.train_path = j.at("train_path").get<std::string>();
  if (j.contains("test_path")) c.test_path = j.at("test_path").get<std::string>();
  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    reject_unknown(s,
                   {"num_queries", "docs_per_query", "feature_dim", "informative_features",
                    "label_noise", "interaction", "curvature", "cut_points"},
                   "synthetic");
    read(s, "num_queries", c.synthetic.num_queries);
    read(s, "docs_per_query", c.synthetic.docs_per_query);
    read(s, "feature_dim", c.synthetic.feature_dim);
    read(s, "informative_features", c.synthetic.informative_features);
    read_real(s, "label_noise", c.synthetic.label_noise);
    read_real(s, "interaction", c.synthetic.interaction);
    read_real(s, "curvature", c.synthetic.curvature);
    read(s, "cut_points", c.synthetic.cut_points);
  }
  read(j, "synthetic_test_queries", c.synthetic_test_queries);
  read(j, "data_seed", c.data_seed);
  read(j, "binarization_threshold", c.binarization_threshold);
  read_real(j, "production_fraction", c.production_fraction);
  read(j, "etas", c.etas);
  read(j, "mus", c.mus);
  read(j, "click_counts", c.click_counts);
  if (j.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_scheme_kind(s.get<std::string>()));
  }
  if (j.contains("strategies")) {
    c.strategies.clear();
    for (const auto& s : j.at("strategies")) {
      c.strategies.push_back(parse_pair_strategy(s.get<std::string>()));
    }
  }
  if (j.contains("learners")) {
    c.learners.clear();
    for (const auto& s : j.at("learners")) c.learners.push_back(parse_learner(s.get<std::string>()));
  }
  read(j, "seeds", c.seeds);
  if (j.contains("logreg")) read_logreg(j.at("logreg"), c.logreg, "logreg");
  if (j.contains("production")) read_logreg(j.at("production"), c.production, "production");
  if (j.contains("lambdamart")) {
    const json& m = j.at("lambdamart");
    reject_unknown(m,
                   {"num_trees", "num_leaves", "learning_rate", "min_docs_per_leaf", "sigma",
                    "min_hessian", "feature_fraction", "max_bins"},
                   "lambdamart");
    read(m, "num_trees", c.lambdamart.num_trees);
    read(m, "num_leaves", c.lambdamart.num_leaves);
    read_real(m, "learning_rate", c.lambdamart.learning_rate);
    read(m, "min_docs_per_leaf", c.lambdamart.min_docs_per_leaf);
    read_real(m, "sigma", c.lambdamart.sigma);
    read_real(m, "min_hessian", c.lambdamart.min_hessian);
    read_real(m, "feature_fraction", c.lambdamart.feature_fraction);
    read(m, "max_bins", c.lambdamart.max_bins);
  }
  read_real(j, "logreg_gamma", c.logreg_gamma);
  read_real(j, "lambdamart_gamma", c.lambdamart_gamma);
  read_real(j, "clip_inverse", c.clip_inverse);
  if (j.contains("propensity_source")) {
    c.propensity_source = parse_propensity_source(j.at("propensity_source").get<std::string>());
  }
  read(j, "assumed_etas", c.assumed_etas);
  read(j, "swap_sessions", c.swap_sessions);
  read(j, "swap_depth", c.swap_depth);
  read(j, "ks", c.ks);
  read(j, "threads", c.threads);
  read(j, "include_baselines", c.include_baselines);
  read(j, "record_timing", c.record_timing);
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
  json j;
  j["dataset_name"] = c.dataset_name;
  j["train_path"] = c.train_path.string();
  j["test_path"] = c.test_path.string();
  j["synthetic"] = {{"num_queries", c.synthetic.num_queries},
                    {"docs_per_query", c.synthetic.docs_per_query},
                    {"feature_dim", c.synthetic.feature_dim},
                    {"informative_features", c.synthetic.informative_features},
                    {"label_noise", c.synthetic.label_noise},
                    {"interaction", c.synthetic.interaction},
                    {"curvature", c.synthetic.curvature},
                    {"cut_points", c.synthetic.cut_points}};
  j["synthetic_test_queries"] = c.synthetic_test_queries;
  j["data_seed"] = c.data_seed;
  j["binarization_threshold"] = c.binarization_threshold;
  j["production_fraction"] = c.production_fraction;
  j["etas"] = c.etas;
  j["mus"] = c.mus;
  j["click_counts"] = c.click_counts;
  j["schemes"] = json::array();
  for (auto s : c.schemes) j["schemes"].push_back(std::string(to_string(s)));
  j["strategies"] = json::array();
  for (auto s : c.strategies) j["strategies"].push_back(std::string(to_string(s)));
  j["learners"] = json::array();
  for (auto s : c.learners) j["learners"].push_back(std::string(to_string(s)));
  j["seeds"] = c.seeds;
  j["logreg"] = logreg_to_json(c.logreg);
  j["production"] = logreg_to_json(c.production);
  j["lambdamart"] = {{"num_trees", c.lambdamart.num_trees},
                     {"num_leaves", c.lambdamart.num_leaves},
                     {"learning_rate", c.lambdamart.learning_rate},
                     {"min_docs_per_leaf", c.lambdamart.min_docs_per_leaf},
                     {"sigma", c.lambdamart.sigma},
                     {"min_hessian", c.lambdamart.min_hessian},
                     {"feature_fraction", c.lambdamart.feature_fraction},
                     {"max_bins", c.lambdamart.max_bins}};
  j["logreg_gamma"] = real_to_json(c.logreg_gamma);
  j["lambdamart_gamma"] = real_to_json(c.lambdamart_gamma);
  j["clip_inverse"] = real_to_json(c.clip_inverse);
  j["propensity_source"] = std::string(to_string(c.propensity_source));
  j["assumed_etas"] = c.assumed_etas;
  j["swap_sessions"] = c.swap_sessions;
  j["swap_depth"] = c.swap_depth;
  j["ks"] = c.ks;
  j["threads"] = c.threads;
  j["include_baselines"] = c.include_baselines;
  j["record_timing"] = c.record_timing;
  return j.dump(2);
}

ExperimentData load_experiment_data(const ExperimentConfig& config) {
  ExperimentData data;
  if (config.train_path.empty()) {
    data.train = make_synthetic_dataset(config.synthetic, config.data_seed);
    SyntheticCorpusSpec test_spec = config.synthetic;
    test_spec.num_queries = config.synthetic_test_queries;
    data.test = make_synthetic_dataset(test_spec, derive_seed(config.data_seed, {kTagTest}));
  } else {
    if (config.test_path.empty()) throw std::invalid_argument("test_path is required");
    data.train = parse_svmlight(config.train_path);
    data.test = parse_svmlight(config.test_path);
  }
  const std::size_t dim = std::max(data.train.feature_dim, data.test.feature_dim);
  pad_features(data.train, dim);
  pad_features(data.test, dim);
  const int threshold =
      config.binarization_threshold >= 0
          ? config.binarization_threshold
          : default_binarization_threshold(
                std::max(data.train.max_grade(), data.test.max_grade()));
  data.train = binarize(std::move(data.train), threshold);
  data.test = binarize(std::move(data.test), threshold);
  return data;
}

Ranker train_ranker(const ClickLog& log, const Dataset& train, Learner learner,
                    const WeightScheme& scheme, PairStrategy strategy,
                    const LogRegConfig& logreg, const LambdaMartConfig& lambdamart) {
  if (learner == Learner::kLogReg) return train_logreg(log, train, strategy, scheme, logreg);
  const auto pairs = aggregate_pairs(log, train, strategy, scheme);
  if (pairs.empty()) throw std::invalid_argument("click log yields no training pairs");
  return train_lambdamart_on_pairs(pairs, train, lambdamart);
}

MetricReport evaluate_model(const std::filesystem::path& model_path, const Dataset& test,
                            std::span<const std::size_t> ks, bool keep_per_query) {
  const Ranker ranker = load_ranker(model_path);
  if (feature_dim(ranker) != test.feature_dim) {
    throw std::invalid_argument("model expects " + std::to_string(feature_dim(ranker)) +
                                " features, test set has " +
                                std::to_string(test.feature_dim));
  }
  return evaluate(ranker, test, ks, keep_per_query);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, load_experiment_data(config));
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentData& data) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const bool needs_oracle =
      std::find(config.strategies.begin(), config.strategies.end(),
                PairStrategy::kClickedVsIrrelevantOracle) != config.strategies.end();

  auto make_row = [&](const std::string& learner, const std::string& scheme,
                      const std::string& strategy, double eta, double eta_assumed,
                      double mu, std::size_t clicks, std::uint64_t seed,
                      const MetricReport& report, double seconds) {
    ResultRow row;
    row.dataset = config.dataset_name;
    row.learner = learner;
    row.scheme = scheme;
    row.strategy = strategy;
    row.eta = eta;
    row.eta_assumed = eta_assumed;
    row.mu = mu;
    row.n_clicks = clicks;
    row.seed = seed;
    for (std::size_t k : config.ks) row.ndcg.push_back(report.ndcg_at_k.at(k));
    row.map_score = report.map_score;
    row.arp = report.arp;
    row.wall_seconds = config.record_timing ? seconds : 0.0;
    row.propensity = std::string(to_string(config.propensity_source));
    return row;
  };

  ExperimentResult result;
  std::mutex error_mutex;
  auto report_error = [&](std::string message) {
    std::lock_guard<std::mutex> lock(error_mutex);
    result.errors.push_back(std::move(message));
  };

  // One production ranker per repetition.
  struct Production {
    bool ok = false;
    Dataset pool;
    Ranker ranker;
  };
  std::vector<Production> production(config.seeds.size());
  std::vector<ResultRow> baseline_rows;
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    const std::uint64_t seed = config.seeds[s];
    try {
      auto split = split_production(data.train, config.production_fraction,
                                    derive_seed(seed, {kTagSplit}));
      production[s].ranker = train_production_ranker(split.production, config.production);
      production[s].pool = std::move(split.remainder);
      production[s].ok = true;
      if (config.include_baselines) {
        auto t0 = Clock::now();
        const auto prod_report = evaluate(production[s].ranker, data.test, config.ks);
        baseline_rows.push_back(make_row(
            "logreg", "production", "none", 0.0, 0.0, 0.0, 0, seed, prod_report,
            std::chrono::duration<double>(Clock::now() - t0).count()));
        t0 = Clock::now();
        LogRegConfig full = config.logreg;
        full.seed = derive_seed(seed, {kTagTrain});
        const Ranker full_ranker = train_logreg_full_info(production[s].pool, full);
        baseline_rows.push_back(make_row(
            "logreg", "full_info", "none", 0.0, 0.0, 0.0, 0, seed,
            evaluate(full_ranker, data.test, config.ks),
            std::chrono::duration<double>(Clock::now() - t0).count()));
      }
    } catch (const std::exception& e) {
      report_error("seed " + std::to_string(seed) + ": production stage failed: " + e.what());
    }
  }

  struct Cell {
    double eta, mu;
    std::size_t clicks;
    std::size_t seed_index;
  };
  std::vector<Cell> cells;
  for (double eta : config.etas) {
    for (double mu : config.mus) {
      for (std::size_t clicks : config.click_counts) {
        for (std::size_t s = 0; s < config.seeds.size(); ++s) {
          cells.push_back({eta, mu, clicks, s});
        }
      }
    }
  }
  std::vector<std::vector<ResultRow>> cell_rows(cells.size());

  auto run_cell = [&](std::size_t index) {
    const Cell& cell = cells[index];
    const std::uint64_t seed = config.seeds[cell.seed_index];
    const Production& prod = production[cell.seed_index];
    const std::string where = "cell eta=" + param(cell.eta) + " mu=" + param(cell.mu) +
                              " clicks=" + std::to_string(cell.clicks) +
                              " seed=" + std::to_string(seed);
    if (!prod.ok) {
      report_error(where + ": skipped, no production ranker");
      return;
    }
    std::vector<WeightVariant> variants;
    try {
      SimulationConfig sim;
      sim.eta = cell.eta;
      sim.mu = cell.mu;
      sim.total_clicks = cell.clicks;
      sim.oracle_mode = needs_oracle;
      sim.seed = derive_seed(seed, {kTagClicks, cell.eta, cell.mu,
                                    static_cast<double>(cell.clicks)});
      ClickLog log = simulate_clicks(prod.ranker, prod.pool, sim);
      switch (config.propensity_source) {
        case PropensitySource::kTrue:
          variants.push_back({cell.eta, std::move(log)});
          break;
        case PropensitySource::kMisspecified:
          for (double assumed : config.assumed_etas) {
            variants.push_back({assumed, with_propensities(log, [assumed](std::size_t rank) {
                                  return observation_propensity(rank, assumed);
                                })});
          }
          break;
        case PropensitySource::kEstimated: {
          SwapExperimentConfig swap;
          swap.sessions = config.swap_sessions;
          swap.max_position = config.swap_depth;
          swap.eta = cell.eta;
          swap.mu = cell.mu;
          swap.seed = derive_seed(seed, {kTagSwap, cell.eta, cell.mu,
                                         static_cast<double>(cell.clicks)});
          const PropensityCurve curve = fit_propensity_curve(
              estimate_ratios(simulate_swap_experiment(prod.ranker, prod.pool, swap)));
          variants.push_back({curve.fitted_eta, with_propensities(std::move(log), curve)});
          break;
        }
      }
    } catch (const std::exception& e) {
      report_error(where + ": " + e.what());
      return;
    }

    auto& rows = cell_rows[index];
    for (Learner learner : config.learners) {
      for (const WeightVariant& variant : variants) {
        for (SchemeKind kind : config.schemes) {
          for (PairStrategy strategy : config.strategies) {
            WeightScheme scheme;
            scheme.kind = kind;
            scheme.clip_gamma =
                learner == Learner::kLogReg ? config.logreg_gamma : config.lambdamart_gamma;
            scheme.clip_inverse = config.clip_inverse;
            LogRegConfig logreg = config.logreg;
            LambdaMartConfig lambdamart = config.lambdamart;
            logreg.seed = lambdamart.seed = derive_seed(seed, {kTagTrain});
            try {
              const auto t0 = Clock::now();
              const Ranker ranker = train_ranker(variant.log, prod.pool, learner, scheme,
                                                 strategy, logreg, lambdamart);
              const MetricReport report = evaluate(ranker, data.test, config.ks);
              const double seconds =
                  std::chrono::duration<double>(Clock::now() - t0).count();
              rows.push_back(make_row(std::string(to_string(learner)),
                                      std::string(to_string(kind)),
                                      std::string(to_string(strategy)), cell.eta,
                                      variant.eta_assumed, cell.mu, cell.clicks, seed,
                                      report, seconds));
            } catch (const std::exception& e) {
              report_error(where + " " + std::string(to_string(learner)) + "/" +
                           std::string(to_string(kind)) + "/" +
                           std::string(to_string(strategy)) + ": " + e.what());
            }
          }
        }
      }
    }
  };

  const std::size_t workers = std::min(config.threads, std::max<std::size_t>(1, cells.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  result.rows = std::move(baseline_rows);
  for (auto& rows : cell_rows) {
    for (auto& row : rows) result.rows.push_back(std::move(row));
  }
  std::sort(result.errors.begin(), result.errors.end());
  return result;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, std::string, std::string,
                         double, double, double, std::size_t>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  std::vector<Key> order;
  for (const auto& row : rows) {
    // Estimated propensities differ per seed; group them by cell only.
    const double assumed = row.propensity == "estimated" ? 0.0 : row.eta_assumed;
    Key key{row.dataset, row.learner, row.scheme, row.strategy, row.propensity,
            row.eta, assumed, row.mu, row.n_clicks};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&row);
  }
  std::vector<SummaryRow> out;
  for (const Key& key : order) {
    const auto& members = groups.at(key);
    SummaryRow s;
    s.key = *members.front();
    s.runs = members.size();
    const std::size_t nk = s.key.ndcg.size();
    s.ndcg_std.assign(nk, 0.0);
    for (std::size_t k = 0; k < nk; ++k) {
      std::vector<double> v;
      for (const auto* m : members) v.push_back(m->ndcg[k]);
      s.key.ndcg[k] = mean_of(v);
      s.ndcg_std[k] = std_of(v);
    }
    std::vector<double> maps, arps, assumed, secs;
    for (const auto* m : members) {
      maps.push_back(m->map_score);
      arps.push_back(m->arp);
      assumed.push_back(m->eta_assumed);
      secs.push_back(m->wall_seconds);
    }
    s.key.map_score = mean_of(maps);
    s.map_std = std_of(maps);
    s.key.arp = mean_of(arps);
    s.arp_std = std_of(arps);
    s.key.eta_assumed = mean_of(assumed);
    s.key.wall_seconds = mean_of(secs);
    out.push_back(std::move(s));
  }
  return out;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::span<const std::size_t> ks,
                       std::ostream& out, bool timestamp_header) {
  if (timestamp_header) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated " << buf << '\n';
  }
  out << "dataset,learner,scheme,strategy,eta,eta_assumed,mu,n_clicks,seed";
  for (std::size_t k : ks) out << ",ndcg@" << k;
  out << ",map,arp,wall_seconds,propensity\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.learner << ',' << r.scheme << ',' << r.strategy << ','
        << param(r.eta) << ',' << param(r.eta_assumed) << ',' << param(r.mu) << ','
        << r.n_clicks << ',' << r.seed;
    for (double v : r.ndcg) out << ',' << fmt("%.6f", v);
    out << ',' << fmt("%.6f", r.map_score) << ',' << fmt("%.6f", r.arp) << ','
        << fmt("%.3f", r.wall_seconds) << ',' << r.propensity << '\n';
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::span<const std::size_t> ks,
                       std::ostream& out) {
  out << "dataset,learner,scheme,strategy,propensity,eta,eta_assumed,mu,n_clicks,runs";
  for (std::size_t k : ks) out << ",ndcg@" << k << "_mean,ndcg@" << k << "_std";
  out << ",map_mean,map_std,arp_mean,arp_std\n";
  for (const auto& s : rows) {
    const ResultRow& r = s.key;
    out << r.dataset << ',' << r.learner << ',' << r.scheme << ',' << r.strategy << ','
        << r.propensity << ',' << param(r.eta) << ',' << param(r.eta_assumed) << ','
        << param(r.mu) << ',' << r.n_clicks << ',' << s.runs;
    for (std::size_t k = 0; k < r.ndcg.size(); ++k) {
      out << ',' << fmt("%.6f", r.ndcg[k]) << ',' << fmt("%.6f", s.ndcg_std[k]);
    }
    out << ',' << fmt("%.6f", r.map_score) << ',' << fmt("%.6f", s.map_std) << ','
        << fmt("%.6f", r.arp) << ',' << fmt("%.6f", s.arp_std) << '\n';
  }
}

}  // namespace prsrank
