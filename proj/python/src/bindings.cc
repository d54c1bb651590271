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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>
#include <sstream>

#include "prsrank/data.h"
#include "prsrank/experiment.h"
#include "prsrank/learn.h"
#include "prsrank/metrics.h"
#include "prsrank/oracle.h"
#include "prsrank/oracle_suite.h"
#include "prsrank/propensity_est.h"
#include "prsrank/ranker.h"
#include "prsrank/simulate.h"
#include "prsrank/weighting.h"

namespace py = pybind11;
using namespace prsrank;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

OracleSession oracle_session(std::vector<std::uint8_t> relevance,
                             std::vector<double> propensities, std::vector<double> scores) {
  OracleSession s;
  s.relevance = std::move(relevance);
  s.propensities = std::move(propensities);
  s.delta = logistic_pair_loss(std::move(scores));
  return s;
}

py::dict report_to_dict(const MetricReport& r) {
  py::dict d;
  for (const auto& [k, v] : r.ndcg_at_k) d[py::str("ndcg@" + std::to_string(k))] = v;
  d["map"] = r.map_score;
  d["arp"] = r.arp;
  d["evaluated_queries"] = r.evaluated_queries;
  d["total_queries"] = r.total_queries;
  return d;
}

py::dict row_to_dict(const ResultRow& r, const std::vector<std::size_t>& ks) {
  py::dict d;
  d["dataset"] = r.dataset;
  d["learner"] = r.learner;
  d["scheme"] = r.scheme;
  d["strategy"] = r.strategy;
  d["eta"] = r.eta;
  d["eta_assumed"] = r.eta_assumed;
  d["mu"] = r.mu;
  d["n_clicks"] = r.n_clicks;
  d["seed"] = r.seed;
  for (std::size_t i = 0; i < ks.size() && i < r.ndcg.size(); ++i) {
    d[py::str("ndcg@" + std::to_string(ks[i]))] = r.ndcg[i];
  }
  d["map"] = r.map_score;
  d["arp"] = r.arp;
  d["wall_seconds"] = r.wall_seconds;
  d["propensity"] = r.propensity;
  return d;
}

}  // namespace

PYBIND11_MODULE(_prsrank, m) {
  m.doc() = "Propensity ratio scoring for unbiased learning to rank";

  // data
  py::class_<GradedDocument>(m, "GradedDocument")
      .def_readonly("features", &GradedDocument::features)
      .def_readonly("graded_label", &GradedDocument::graded_label);
  py::class_<QueryGroup>(m, "QueryGroup")
      .def_readonly("qid", &QueryGroup::qid)
      .def_readonly("docs", &QueryGroup::docs)
      .def_readonly("binary_relevance", &QueryGroup::binary_relevance)
      .def("__len__", &QueryGroup::size);
  py::class_<Dataset>(m, "Dataset")
      .def_readonly("queries", &Dataset::queries)
      .def_readonly("feature_dim", &Dataset::feature_dim)
      .def_readonly("binarization_threshold", &Dataset::binarization_threshold)
      .def("num_documents", &Dataset::num_documents)
      .def("max_grade", &Dataset::max_grade)
      .def("__len__", [](const Dataset& d) { return d.queries.size(); });
  py::class_<SyntheticCorpusSpec>(m, "SyntheticCorpusSpec")
      .def(py::init<>())
      .def_readwrite("num_queries", &SyntheticCorpusSpec::num_queries)
      .def_readwrite("docs_per_query", &SyntheticCorpusSpec::docs_per_query)
      .def_readwrite("feature_dim", &SyntheticCorpusSpec::feature_dim)
      .def_readwrite("informative_features", &SyntheticCorpusSpec::informative_features)
      .def_readwrite("label_noise", &SyntheticCorpusSpec::label_noise)
      .def_readwrite("interaction", &SyntheticCorpusSpec::interaction)
      .def_readwrite("curvature", &SyntheticCorpusSpec::curvature)
      .def_readwrite("cut_points", &SyntheticCorpusSpec::cut_points);

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("make_synthetic_dataset", &make_synthetic_dataset, py::arg("spec"), py::arg("seed"));
  m.def("parse_svmlight", py::overload_cast<const std::filesystem::path&>(&parse_svmlight),
        py::arg("path"));
  m.def(
      "parse_svmlight_text",
      [](const std::string& text) {
        std::istringstream in(text);
        return parse_svmlight(in);
      },
      py::arg("text"));
  m.def("write_svmlight",
        py::overload_cast<const Dataset&, const std::filesystem::path&>(&write_svmlight),
        py::arg("dataset"), py::arg("path"));
  m.def("binarize", &binarize, py::arg("dataset"), py::arg("threshold"));
  m.def(
      "split_production",
      [](const Dataset& d, double fraction, std::uint64_t seed) {
        auto s = split_production(d, fraction, seed);
        return py::make_tuple(std::move(s.production), std::move(s.remainder));
      },
      py::arg("dataset"), py::arg("fraction"), py::arg("seed"));

  // rankers
  py::class_<LinearRanker>(m, "LinearRanker")
      .def(py::init<>())
      .def(py::init([](std::vector<double> w) { return LinearRanker{std::move(w)}; }))
      .def_readwrite("weights", &LinearRanker::weights)
      .def("score", [](const LinearRanker& r, const std::vector<double>& x) { return r.score(x); });
  py::class_<GBDTRanker>(m, "GBDTRanker")
      .def_property_readonly("num_trees", [](const GBDTRanker& g) { return g.trees.size(); })
      .def_readonly("feature_dim", &GBDTRanker::feature_dim)
      .def("score", [](const GBDTRanker& r, const std::vector<double>& x) { return r.score(x); });
  m.def(
      "score_query", [](const Ranker& r, const QueryGroup& q) { return score_query(r, q); },
      py::arg("ranker"), py::arg("query"));
  m.def("save_ranker", py::overload_cast<const Ranker&, const std::filesystem::path&>(&save_ranker),
        py::arg("ranker"), py::arg("path"));
  m.def("load_ranker", py::overload_cast<const std::filesystem::path&>(&load_ranker),
        py::arg("path"));

  // simulation
  m.def("observation_propensity", &observation_propensity, py::arg("rank"), py::arg("eta"));
  py::class_<ClickSession>(m, "ClickSession")
      .def_readonly("qid", &ClickSession::qid)
      .def_readonly("presented", &ClickSession::presented)
      .def_readonly("clicks", &ClickSession::clicks)
      .def_readonly("propensities", &ClickSession::propensities)
      .def_readonly("hidden_observation", &ClickSession::hidden_observation)
      .def_readonly("hidden_relevance", &ClickSession::hidden_relevance);
  py::class_<ClickLog>(m, "ClickLog")
      .def_readonly("sessions", &ClickLog::sessions)
      .def("total_clicks", &ClickLog::total_clicks)
      .def("__len__", [](const ClickLog& l) { return l.sessions.size(); });
  py::class_<LogRegConfig>(m, "LogRegConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &LogRegConfig::epochs)
      .def_readwrite("learning_rate", &LogRegConfig::learning_rate)
      .def_readwrite("l2_lambda", &LogRegConfig::l2_lambda)
      .def_readwrite("batch_queries", &LogRegConfig::batch_queries)
      .def_readwrite("step_decay", &LogRegConfig::step_decay)
      .def_readwrite("seed", &LogRegConfig::seed);
  py::class_<LambdaMartConfig>(m, "LambdaMartConfig")
      .def(py::init<>())
      .def_readwrite("num_trees", &LambdaMartConfig::num_trees)
      .def_readwrite("num_leaves", &LambdaMartConfig::num_leaves)
      .def_readwrite("learning_rate", &LambdaMartConfig::learning_rate)
      .def_readwrite("min_docs_per_leaf", &LambdaMartConfig::min_docs_per_leaf)
      .def_readwrite("sigma", &LambdaMartConfig::sigma)
      .def_readwrite("feature_fraction", &LambdaMartConfig::feature_fraction)
      .def_readwrite("max_bins", &LambdaMartConfig::max_bins)
      .def_readwrite("seed", &LambdaMartConfig::seed);
  m.def("train_production_ranker", &train_production_ranker, py::arg("production"),
        py::arg("config") = LogRegConfig{});
  m.def(
      "simulate_clicks",
      [](const Ranker& ranker, const Dataset& pool, double eta, double mu, std::uint64_t seed,
         std::size_t total_clicks, bool oracle_mode) {
        SimulationConfig c{eta, mu, seed, total_clicks, oracle_mode};
        return simulate_clicks(ranker, pool, c);
      },
      py::arg("ranker"), py::arg("pool"), py::arg("eta") = 1.0, py::arg("mu") = 0.1,
      py::arg("seed") = 0, py::arg("total_clicks") = 128000, py::arg("oracle_mode") = false);
  m.def(
      "with_propensities",
      [](ClickLog log, const std::function<double(std::size_t)>& f) {
        return with_propensities(std::move(log), f);
      },
      py::arg("log"), py::arg("propensity_by_rank"));
  m.def("write_click_log",
        py::overload_cast<const ClickLog&, const std::filesystem::path&>(&write_click_log),
        py::arg("log"), py::arg("path"));
  m.def("read_click_log", py::overload_cast<const std::filesystem::path&>(&read_click_log),
        py::arg("path"));

  // weighting
  py::enum_<SchemeKind>(m, "SchemeKind")
      .value("NAIVE", SchemeKind::kNaive)
      .value("IPS", SchemeKind::kIps)
      .value("PNS", SchemeKind::kPns)
      .value("PRS", SchemeKind::kPrs);
  py::enum_<PairStrategy>(m, "PairStrategy")
      .value("CLICKED_VS_ALL", PairStrategy::kClickedVsAll)
      .value("CLICKED_VS_NONCLICKED", PairStrategy::kClickedVsNonClicked)
      .value("CLICKED_VS_IRRELEVANT_ORACLE", PairStrategy::kClickedVsIrrelevantOracle);
  py::class_<WeightScheme>(m, "WeightScheme")
      .def(py::init([](SchemeKind kind, double gamma, double clip_inverse) {
             return WeightScheme{kind, gamma, clip_inverse};
           }),
           py::arg("kind"), py::arg("clip_gamma") = kInf, py::arg("clip_inverse") = kInf)
      .def_readwrite("kind", &WeightScheme::kind)
      .def_readwrite("clip_gamma", &WeightScheme::clip_gamma)
      .def_readwrite("clip_inverse", &WeightScheme::clip_inverse);
  m.def("pair_weight", &pair_weight, py::arg("scheme"), py::arg("p_i"), py::arg("p_j"));
  m.def(
      "generate_pairs",
      [](const ClickSession& s, PairStrategy strategy, const WeightScheme& scheme) {
        py::list out;
        for (const auto& p : generate_pairs(s, strategy, scheme)) {
          out.append(py::make_tuple(p.i, p.j, p.weight));
        }
        return out;
      },
      py::arg("session"), py::arg("strategy"), py::arg("scheme"));

  // learning
  m.def("pairwise_logistic_loss", &pairwise_logistic_loss, py::arg("score_i"),
        py::arg("score_j"), py::arg("weight") = 1.0);
  m.def(
      "train_logreg",
      [](const ClickLog& log, const Dataset& d, PairStrategy strategy, const WeightScheme& scheme,
         const LogRegConfig& config) { return train_logreg(log, d, strategy, scheme, config); },
      py::arg("log"), py::arg("dataset"), py::arg("strategy"), py::arg("scheme"),
      py::arg("config") = LogRegConfig{});
  m.def("train_lambdamart", &train_lambdamart, py::arg("log"), py::arg("dataset"),
        py::arg("scheme"), py::arg("config") = LambdaMartConfig{});

  // metrics
  m.def(
      "ndcg_at_k",
      [](const std::vector<double>& s, const std::vector<std::uint8_t>& r, std::size_t k) {
        return ndcg_at_k(s, r, k);
      },
      py::arg("scores"), py::arg("relevance"), py::arg("k"));
  m.def(
      "average_precision",
      [](const std::vector<double>& s, const std::vector<std::uint8_t>& r) {
        return average_precision(s, r);
      },
      py::arg("scores"), py::arg("relevance"));
  m.def(
      "arp",
      [](const std::vector<double>& s, const std::vector<std::uint8_t>& r) { return arp(s, r); },
      py::arg("scores"), py::arg("relevance"));
  m.def(
      "wmrr",
      [](const std::vector<std::pair<std::size_t, double>>& ranks_weights) {
        std::vector<ClickedRank> c;
        for (auto [rank, w] : ranks_weights) c.push_back({rank, w});
        return wmrr(c);
      },
      py::arg("ranks_weights"));
  m.def(
      "evaluate",
      [](const Ranker& r, const Dataset& d, const std::vector<std::size_t>& ks) {
        return report_to_dict(evaluate(r, d, ks));
      },
      py::arg("ranker"), py::arg("dataset"), py::arg("ks") = std::vector<std::size_t>{5, 10});

  // oracle
  m.def(
      "exact_expected_loss",
      [](std::vector<std::uint8_t> r, std::vector<double> p, std::vector<double> scores,
         const WeightScheme& scheme, PairStrategy strategy) {
        return exact_expected_loss(oracle_session(std::move(r), std::move(p), std::move(scores)),
                                   scheme, strategy);
      },
      py::arg("relevance"), py::arg("propensities"), py::arg("scores"), py::arg("scheme"),
      py::arg("strategy") = PairStrategy::kClickedVsNonClicked);
  m.def(
      "closed_form_ips_expectation",
      [](std::vector<std::uint8_t> r, std::vector<double> p, std::vector<double> scores) {
        return closed_form_ips_expectation(
            oracle_session(std::move(r), std::move(p), std::move(scores)));
      },
      py::arg("relevance"), py::arg("propensities"), py::arg("scores"));
  m.def(
      "closed_form_prs_expectation",
      [](std::vector<std::uint8_t> r, std::vector<double> p, std::vector<double> scores) {
        return closed_form_prs_expectation(
            oracle_session(std::move(r), std::move(p), std::move(scores)));
      },
      py::arg("relevance"), py::arg("propensities"), py::arg("scores"));
  m.def(
      "prs_relevant_residue",
      [](std::vector<std::uint8_t> r, std::vector<double> p, std::vector<double> scores) {
        return prs_relevant_residue(oracle_session(std::move(r), std::move(p), std::move(scores)));
      },
      py::arg("relevance"), py::arg("propensities"), py::arg("scores"));
  m.def(
      "run_oracle_suite",
      [](std::uint64_t seed, std::size_t trials, std::size_t max_docs) {
        OracleSuiteOptions o;
        o.seed = seed;
        o.trials = trials;
        o.max_docs = max_docs;
        py::list out;
        for (const auto& c : run_oracle_suite(o)) {
          py::dict d;
          d["name"] = c.name;
          d["passed"] = c.passed;
          d["worst"] = c.worst;
          d["trials"] = c.trials;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 0, py::arg("trials") = 200, py::arg("max_docs") = 8);

  // propensity estimation
  m.def(
      "simulate_swap_experiment",
      [](const Ranker& ranker, const Dataset& pool, std::size_t sessions, std::size_t depth,
         double eta, double mu, std::uint64_t seed) {
        SwapExperimentConfig c{sessions, depth, eta, mu, seed};
        const SwapLog log = simulate_swap_experiment(ranker, pool, c);
        py::list out;
        for (const auto& p : log.pairs) {
          out.append(py::make_tuple(p.position, p.clicks_upper, p.clicks_lower, p.sessions));
        }
        return out;
      },
      py::arg("ranker"), py::arg("pool"), py::arg("sessions") = 200000, py::arg("depth") = 5,
      py::arg("eta") = 1.0, py::arg("mu") = 0.1, py::arg("seed") = 0);
  m.def(
      "estimate_ratios",
      [](const std::vector<std::tuple<std::size_t, double, double, std::size_t>>& counts) {
        SwapLog log;
        for (const auto& [k, up, low, n] : counts) log.pairs.push_back({k, up, low, n});
        return estimate_ratios(log);
      },
      py::arg("counts"));
  m.def(
      "fit_propensity_eta",
      [](std::vector<double> ratios) { return fit_propensity_curve(std::move(ratios)).fitted_eta; },
      py::arg("ratios"));

  // experiments
  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const ExperimentConfig c = parse_experiment_config(config_json);
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(c);
        }
        py::list rows;
        for (const auto& r : result.rows) rows.append(row_to_dict(r, c.ks));
        return py::make_tuple(rows, result.errors);
      },
      py::arg("config_json"));
  m.def(
      "default_config_json",
      []() { return experiment_config_to_json(ExperimentConfig{}); });
}
