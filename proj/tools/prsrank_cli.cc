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

// prsrank: command-line driver for data preparation, click simulation,
// training, evaluation, sweeps and the oracle checks.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prsrank/data.h"
#include "prsrank/experiment.h"
#include "prsrank/learn.h"
#include "prsrank/metrics.h"
#include "prsrank/oracle_suite.h"
#include "prsrank/propensity_est.h"
#include "prsrank/ranker.h"
#include "prsrank/simulate.h"
#include "prsrank/weighting.h"

namespace {

using namespace prsrank;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Opens `path` for writing, or returns std::cout for "-" / empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

Dataset load_dataset(const std::string& path, int threshold) {
  Dataset d = parse_svmlight(path);
  return threshold >= 0 ? binarize(std::move(d), threshold) : d;
}

void print_report(const MetricReport& report, std::ostream& out) {
  out << "metric,value\n";
  for (const auto& [k, v] : report.ndcg_at_k) out << "ndcg@" << k << ',' << v << '\n';
  out << "map," << report.map_score << '\n';
  out << "arp," << report.arp << '\n';
  out << "evaluated_queries," << report.evaluated_queries << '\n';
  out << "total_queries," << report.total_queries << '\n';
}

struct LogRegFlags {
  LogRegConfig config;
  void add(CLI::App* app, const std::string& prefix = "") {
    app->add_option("--" + prefix + "epochs", config.epochs, "gradient steps");
    app->add_option("--" + prefix + "lr", config.learning_rate, "step size");
    app->add_option("--" + prefix + "l2", config.l2_lambda, "L2 penalty");
    app->add_option("--" + prefix + "batch-queries", config.batch_queries,
                    "queries per mini-batch, 0 = full batch");
  }
};

struct LambdaMartFlags {
  LambdaMartConfig config;
  void add(CLI::App* app) {
    app->add_option("--trees", config.num_trees);
    app->add_option("--leaves", config.num_leaves);
    app->add_option("--shrinkage", config.learning_rate);
    app->add_option("--min-leaf-docs", config.min_docs_per_leaf);
    app->add_option("--sigma", config.sigma);
    app->add_option("--feature-fraction", config.feature_fraction);
    app->add_option("--max-bins", config.max_bins);
  }
};

// ---- gnuplot helper ----

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

// Pivots a results CSV into whitespace columns: x, then mean and std of
// `metric` for every series.
int write_gnuplot(const std::string& results, const std::string& x_column,
                  const std::string& series_column, const std::string& metric,
                  std::ostream& out) {
  std::ifstream in(results);
  if (!in) throw std::runtime_error("cannot open " + results);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("no column '" + name + "' in " + results);
  };
  const std::size_t xc = column(x_column), sc = column(series_column), mc = column(metric);
  std::map<double, std::map<std::string, std::vector<double>>> table;
  std::set<std::string> series;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw std::runtime_error("ragged row: " + line);
    const double x = cells[xc] == "inf" ? kInf : std::stod(cells[xc]);
    table[x][cells[sc]].push_back(std::stod(cells[mc]));
    series.insert(cells[sc]);
  }
  out << "# " << x_column;
  for (const auto& s : series) out << ' ' << s << "_mean " << s << "_std";
  out << '\n';
  for (const auto& [x, by_series] : table) {
    out << x;
    for (const auto& s : series) {
      auto it = by_series.find(s);
      if (it == by_series.end()) {
        out << " NaN NaN";
        continue;
      }
      const auto& v = it->second;
      double mean = 0.0;
      for (double y : v) mean += y;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double y : v) var += (y - mean) * (y - mean);
      const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
      out << ' ' << mean << ' ' << sd;
    }
    out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbiased learning to rank from position-biased clicks"};
  app.require_subcommand(1);
  int status = 0;

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "write a synthetic LETOR-style corpus");
  SyntheticCorpusSpec synth_spec;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--queries", synth_spec.num_queries);
  synth->add_option("--docs", synth_spec.docs_per_query);
  synth->add_option("--features", synth_spec.feature_dim);
  synth->add_option("--informative", synth_spec.informative_features);
  synth->add_option("--label-noise", synth_spec.label_noise);
  synth->add_option("--interaction", synth_spec.interaction, "weight of tanh(z0 * z1)");
  synth->add_option("--curvature", synth_spec.curvature, "weight of the z2 quadratic term");
  synth->add_option("--seed", synth_seed);
  synth->add_option("-o,--out", synth_out)->required();
  synth->callback([&] {
    write_svmlight(make_synthetic_dataset(synth_spec, synth_seed), synth_out);
  });

  // prepare
  auto* prepare = app.add_subcommand("prepare", "parse, binarize and carve the production slice");
  std::string prep_in, prep_prod, prep_rest;
  int prep_threshold = -1;
  double prep_fraction = 0.01;
  std::uint64_t prep_seed = 0;
  prepare->add_option("-i,--input", prep_in)->required()->check(CLI::ExistingFile);
  prepare->add_option("--threshold", prep_threshold, "binarization grade, default from range");
  prepare->add_option("--production-fraction", prep_fraction);
  prepare->add_option("--seed", prep_seed);
  prepare->add_option("--production-out", prep_prod)->required();
  prepare->add_option("--remainder-out", prep_rest)->required();
  prepare->callback([&] {
    const Dataset d = load_dataset(prep_in, prep_threshold);
    const auto split = split_production(d, prep_fraction, prep_seed);
    write_svmlight(split.production, prep_prod);
    write_svmlight(split.remainder, prep_rest);
    std::size_t relevant = 0;
    for (const auto& q : d.queries) relevant += q.num_relevant();
    std::cout << "queries=" << d.queries.size() << " documents=" << d.num_documents()
              << " features=" << d.feature_dim << " threshold=" << d.binarization_threshold
              << " relevant=" << relevant << " production=" << split.production.queries.size()
              << " remainder=" << split.remainder.queries.size() << '\n';
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "synthesize a position-biased click log");
  std::string sim_pool, sim_production, sim_ranker, sim_out, sim_save;
  int sim_threshold = -1;
  SimulationConfig sim_config;
  sim_config.total_clicks = 128000;
  LogRegFlags sim_prod_flags;
  simulate->add_option("--pool", sim_pool, "queries to simulate on")->required()->check(CLI::ExistingFile);
  auto* sim_src = simulate->add_option_group("ranker");
  sim_src->add_option("--production", sim_production, "train the production ranker on this file")
      ->check(CLI::ExistingFile);
  sim_src->add_option("--ranker", sim_ranker, "use a saved ranker")->check(CLI::ExistingFile);
  sim_src->require_option(1);
  simulate->add_option("--save-ranker", sim_save, "write the production ranker here");
  simulate->add_option("--threshold", sim_threshold);
  simulate->add_option("--eta", sim_config.eta);
  simulate->add_option("--mu", sim_config.mu);
  simulate->add_option("--clicks", sim_config.total_clicks);
  simulate->add_option("--seed", sim_config.seed);
  simulate->add_flag("--oracle", sim_config.oracle_mode, "keep hidden observation/relevance");
  simulate->add_option("-o,--out", sim_out)->required();
  sim_prod_flags.add(simulate, "prod-");
  simulate->callback([&] {
    const Dataset pool = load_dataset(sim_pool, sim_threshold);
    Ranker ranker = sim_ranker.empty()
                        ? Ranker(train_production_ranker(
                              load_dataset(sim_production, sim_threshold), sim_prod_flags.config))
                        : load_ranker(sim_ranker);
    if (!sim_save.empty()) save_ranker(ranker, sim_save);
    const ClickLog log = simulate_clicks(ranker, pool, sim_config);
    write_click_log(log, sim_out);
    std::cerr << "sessions=" << log.sessions.size() << " clicks=" << log.total_clicks() << '\n';
  });

  // train
  auto* train = app.add_subcommand("train", "fit a ranker on a click log");
  std::string train_log, train_data, train_out, train_learner = "logreg", train_scheme = "prs",
                                                 train_strategy = "clicked_vs_nonclicked";
  int train_threshold = -1;
  double train_gamma = -1.0, train_clip_inverse = kInf, train_assumed_eta = -1.0;
  LogRegFlags train_logreg;
  LambdaMartFlags train_mart;
  std::uint64_t train_seed = 0;
  train->add_option("--clicks", train_log)->required()->check(CLI::ExistingFile);
  train->add_option("--train", train_data, "feature file of the logged queries")
      ->required()->check(CLI::ExistingFile);
  train->add_option("--threshold", train_threshold);
  train->add_option("--learner", train_learner, "logreg | lambdamart");
  train->add_option("--scheme", train_scheme, "naive | ips | pns | prs");
  train->add_option("--strategy", train_strategy,
                    "clicked_vs_all | clicked_vs_nonclicked | clicked_vs_irrelevant_oracle");
  train->add_option("--gamma", train_gamma, "ratio clip, default 1 (logreg) or inf (lambdamart)");
  train->add_option("--clip-inverse", train_clip_inverse);
  train->add_option("--assumed-eta", train_assumed_eta,
                    "recompute propensities as (1/rank)^eta before weighting");
  train->add_option("--seed", train_seed);
  train->add_option("-o,--out", train_out)->required();
  train_logreg.add(train);
  train_mart.add(train);
  train->callback([&] {
    const Dataset data = load_dataset(train_data, train_threshold);
    ClickLog log = read_click_log(train_log);
    if (train_assumed_eta >= 0.0) {
      log = with_propensities(std::move(log), [eta = train_assumed_eta](std::size_t rank) {
        return observation_propensity(rank, eta);
      });
    }
    const Learner learner = parse_learner(train_learner);
    WeightScheme scheme;
    scheme.kind = parse_scheme_kind(train_scheme);
    scheme.clip_gamma = train_gamma > 0.0 ? train_gamma
                        : learner == Learner::kLogReg ? 1.0
                                                      : kInf;
    scheme.clip_inverse = train_clip_inverse;
    train_logreg.config.seed = train_mart.config.seed = train_seed;
    const Ranker ranker = train_ranker(log, data, learner, scheme,
                                       parse_pair_strategy(train_strategy),
                                       train_logreg.config, train_mart.config);
    save_ranker(ranker, train_out);
  });

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score a saved ranker on a labeled set");
  std::string eval_model, eval_test, eval_out, eval_per_query;
  int eval_threshold = -1;
  std::vector<std::size_t> eval_ks = {5, 10};
  evaluate_cmd->add_option("--model", eval_model)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--test", eval_test)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--threshold", eval_threshold);
  evaluate_cmd->add_option("-k,--k", eval_ks, "NDCG cutoffs")->delimiter(',');
  evaluate_cmd->add_option("--per-query", eval_per_query, "per-query CSV path");
  evaluate_cmd->add_option("-o,--out", eval_out, "report CSV, default stdout");
  evaluate_cmd->callback([&] {
    const Dataset test = load_dataset(eval_test, eval_threshold);
    const MetricReport report = evaluate_model(eval_model, test, eval_ks, !eval_per_query.empty());
    Output out(eval_out);
    print_report(report, out.stream());
    if (!eval_per_query.empty()) {
      Output per(eval_per_query);
      write_per_query_csv(report, per.stream());
    }
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run an experiment grid");
  std::string sweep_config_path, sweep_out, sweep_summary, sweep_source, sweep_train, sweep_test;
  std::vector<double> sweep_etas, sweep_mus, sweep_assumed;
  std::vector<std::size_t> sweep_clicks;
  std::vector<std::string> sweep_schemes, sweep_strategies, sweep_learners;
  std::vector<std::uint64_t> sweep_seeds;
  std::size_t sweep_threads = 0;
  bool sweep_no_timestamp = false, sweep_no_timing = false, sweep_print_config = false,
       sweep_baselines = false;
  sweep->add_option("-c,--config", sweep_config_path, "JSON config")->check(CLI::ExistingFile);
  sweep->add_option("--train", sweep_train, "training file (overrides config)");
  sweep->add_option("--test", sweep_test, "test file (overrides config)");
  sweep->add_option("--etas", sweep_etas)->delimiter(',');
  sweep->add_option("--mus", sweep_mus)->delimiter(',');
  sweep->add_option("--clicks", sweep_clicks)->delimiter(',');
  sweep->add_option("--schemes", sweep_schemes)->delimiter(',');
  sweep->add_option("--strategies", sweep_strategies)->delimiter(',');
  sweep->add_option("--learners", sweep_learners)->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds)->delimiter(',');
  sweep->add_option("--propensity", sweep_source, "true | estimated | misspecified");
  sweep->add_option("--assumed-etas", sweep_assumed)->delimiter(',');
  sweep->add_option("--threads", sweep_threads);
  sweep->add_flag("--baselines", sweep_baselines, "add production and full-information rows");
  sweep->add_flag("--no-timestamp", sweep_no_timestamp, "omit the timestamp header line");
  sweep->add_flag("--no-timing", sweep_no_timing, "write wall_seconds as 0");
  sweep->add_flag("--print-config", sweep_print_config, "print the effective config and exit");
  sweep->add_option("-o,--out", sweep_out, "results CSV, default stdout");
  sweep->add_option("--summary", sweep_summary, "mean/std CSV per cell");
  sweep->callback([&] {
    ExperimentConfig config = sweep_config_path.empty()
                                  ? ExperimentConfig{}
                                  : load_experiment_config(sweep_config_path);
    if (!sweep_train.empty()) config.train_path = sweep_train;
    if (!sweep_test.empty()) config.test_path = sweep_test;
    if (!sweep_etas.empty()) config.etas = sweep_etas;
    if (!sweep_mus.empty()) config.mus = sweep_mus;
    if (!sweep_clicks.empty()) config.click_counts = sweep_clicks;
    if (!sweep_schemes.empty()) {
      config.schemes.clear();
      for (const auto& s : sweep_schemes) config.schemes.push_back(parse_scheme_kind(s));
    }
    if (!sweep_strategies.empty()) {
      config.strategies.clear();
      for (const auto& s : sweep_strategies) config.strategies.push_back(parse_pair_strategy(s));
    }
    if (!sweep_learners.empty()) {
      config.learners.clear();
      for (const auto& s : sweep_learners) config.learners.push_back(parse_learner(s));
    }
    if (!sweep_seeds.empty()) config.seeds = sweep_seeds;
    if (!sweep_source.empty()) config.propensity_source = parse_propensity_source(sweep_source);
    if (!sweep_assumed.empty()) config.assumed_etas = sweep_assumed;
    if (sweep_threads > 0) config.threads = sweep_threads;
    if (sweep_baselines) config.include_baselines = true;
    if (sweep_no_timing) config.record_timing = false;
    config.validate();
    if (sweep_print_config) {
      std::cout << experiment_config_to_json(config) << '\n';
      return;
    }
    const ExperimentResult result = run_experiment(config);
    for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
    Output out(sweep_out);
    write_results_csv(result.rows, config.ks, out.stream(), !sweep_no_timestamp);
    if (!sweep_summary.empty()) {
      Output summary(sweep_summary);
      write_summary_csv(summarize(result.rows), config.ks, summary.stream());
    }
    if (!result.errors.empty()) status = 1;
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "run the enumeration and gradient checks");
  OracleSuiteOptions oracle_options;
  bool oracle_mutate = false;
  oracle->add_option("--seed", oracle_options.seed);
  oracle->add_option("--trials", oracle_options.trials)->check(CLI::PositiveNumber);
  oracle->add_option("--max-docs", oracle_options.max_docs)->check(CLI::Range(1, 16));
  oracle->add_flag("--mutate-prs", oracle_mutate,
                   "replace the PRS closed form with a wrong one to test the harness");
  oracle->callback([&] {
    if (oracle_mutate) {
      oracle_options.prs_closed_form = [](const OracleSession& s) {
        return closed_form_prs_expectation(s) + closed_form_ips_expectation(s) * 1e-3;
      };
    }
    const auto checks = run_oracle_suite(oracle_options);
    print_oracle_report(checks, std::cout);
    if (!all_passed(checks)) status = 1;
  });

  // estimate-propensity
  auto* estimate = app.add_subcommand("estimate-propensity",
                                      "swap-randomize adjacent pairs and estimate p_k / p_1");
  std::string est_pool, est_production, est_ranker, est_log_in, est_log_out;
  int est_threshold = -1;
  SwapExperimentConfig est_config;
  LogRegFlags est_prod_flags;
  estimate->add_option("--pool", est_pool)->check(CLI::ExistingFile);
  estimate->add_option("--production", est_production)->check(CLI::ExistingFile);
  estimate->add_option("--ranker", est_ranker)->check(CLI::ExistingFile);
  estimate->add_option("--from-log", est_log_in, "estimate from an existing swap log CSV")
      ->check(CLI::ExistingFile);
  estimate->add_option("--threshold", est_threshold);
  estimate->add_option("--sessions", est_config.sessions);
  estimate->add_option("--depth", est_config.max_position, "K");
  estimate->add_option("--eta", est_config.eta);
  estimate->add_option("--mu", est_config.mu);
  estimate->add_option("--seed", est_config.seed);
  estimate->add_option("--log-out", est_log_out, "write the swap log CSV");
  est_prod_flags.add(estimate, "prod-");
  estimate->callback([&] {
    SwapLog log;
    if (!est_log_in.empty()) {
      std::ifstream in(est_log_in);
      log = read_swap_log(in);
    } else {
      if (est_pool.empty() || (est_production.empty() == est_ranker.empty())) {
        throw CLI::ValidationError("need --pool and exactly one of --production / --ranker");
      }
      const Dataset pool = load_dataset(est_pool, est_threshold);
      const Ranker ranker =
          est_ranker.empty()
              ? Ranker(train_production_ranker(load_dataset(est_production, est_threshold),
                                               est_prod_flags.config))
              : load_ranker(est_ranker);
      log = simulate_swap_experiment(ranker, pool, est_config);
    }
    if (!est_log_out.empty()) {
      Output out(est_log_out);
      write_swap_log(log, out.stream());
    }
    const PropensityCurve curve = fit_propensity_curve(estimate_ratios(log));
    std::cout << "position,ratio\n";
    for (std::size_t k = 0; k < curve.ratios.size(); ++k) {
      std::cout << k + 1 << ',' << curve.ratios[k] << '\n';
    }
    std::cout << "# fitted_eta," << curve.fitted_eta << '\n';
  });

  // gnuplot
  auto* gnuplot = app.add_subcommand("gnuplot", "pivot a results CSV into gnuplot columns");
  std::string gp_in, gp_x = "n_clicks", gp_series = "scheme", gp_metric = "ndcg@10", gp_out;
  gnuplot->add_option("-i,--input", gp_in)->required()->check(CLI::ExistingFile);
  gnuplot->add_option("--x", gp_x, "x-axis column");
  gnuplot->add_option("--series", gp_series, "column that names the curves");
  gnuplot->add_option("--metric", gp_metric);
  gnuplot->add_option("-o,--out", gp_out);
  gnuplot->callback([&] {
    Output out(gp_out);
    write_gnuplot(gp_in, gp_x, gp_series, gp_metric, out.stream());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "prsrank: " << e.what() << '\n';
    return 2;
  }
  return status;
}
