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

#include "prsrank/oracle_suite.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "prsrank/learn.h"
#include "prsrank/simulate.h"

namespace prsrank {
namespace {

OracleCheck make_check(std::string name) {
  OracleCheck c;
  c.name = std::move(name);
  c.passed = true;
  return c;
}

void record(OracleCheck& check, double error, bool ok) {
  ++check.trials;
  check.worst = std::max(check.worst, error);
  check.passed = check.passed && ok;
}

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

}  // namespace

bool close_enough(double a, double b, double tol) { return relative_gap(a, b) <= tol; }

RandomOracleSession random_oracle_session(std::mt19937_64& rng, std::size_t max_docs) {
  std::uniform_int_distribution<std::size_t> size(1, std::max<std::size_t>(1, max_docs));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = size(rng);

  RandomOracleSession out;
  out.session.relevance.resize(n);
  out.session.propensities.resize(n);
  const bool position_model = unit(rng) < 0.5;
  const double eta = 2.0 * unit(rng);
  for (std::size_t k = 0; k < n; ++k) {
    out.session.relevance[k] = unit(rng) < 0.4;
    out.session.propensities[k] =
        position_model ? observation_propensity(k + 1, eta) : 0.05 + 0.95 * unit(rng);
  }
  out.scores.resize(n);
  for (auto& s : out.scores) s = normal(rng);
  out.session.delta = logistic_pair_loss(out.scores);
  return out;
}

std::vector<OracleCheck> run_oracle_suite(const OracleSuiteOptions& options) {
  std::mt19937_64 rng(options.seed);
  const WeightScheme ips{SchemeKind::kIps};
  const WeightScheme prs{SchemeKind::kPrs};

  auto unbiased = make_check("pointwise IPS unbiasedness (tol 1e-12)");
  auto ips_form = make_check("IPS enumeration vs closed form (tol 1e-10)");
  auto prs_form = make_check("PRS enumeration vs closed form + relevant residue (tol 1e-10)");
  auto bounds = make_check("rho <= tau and prs_bound <= ips_bound");
  auto logistic = make_check("logistic gradient vs central differences (rel 1e-5)");
  auto lambdas = make_check("lambda gradients vs central differences (rel 1e-5)");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (std::size_t t = 0; t < options.trials; ++t) {
    auto random = random_oracle_session(rng, options.max_docs);
    const OracleSession& s = random.session;
    const std::size_t n = s.size();

    std::vector<double> per_doc(n);
    for (auto& d : per_doc) d = 3.0 * unit(rng);
    const auto check = pointwise_ips_unbiasedness(s, per_doc);
    const double gap_u = relative_gap(check.estimate_expectation, check.true_risk);
    record(unbiased, gap_u, gap_u <= 1e-12);

    const double ips_exact =
        exact_expected_loss(s, ips, PairStrategy::kClickedVsNonClicked);
    const double gap_i = relative_gap(ips_exact, options.ips_closed_form(s));
    record(ips_form, gap_i, gap_i <= 1e-10);

    const double prs_exact =
        exact_expected_loss(s, prs, PairStrategy::kClickedVsNonClicked);
    const double gap_p =
        relative_gap(prs_exact, options.prs_closed_form(s) + prs_relevant_residue(s));
    record(prs_form, gap_p, gap_p <= 1e-10);

    if (std::count(s.relevance.begin(), s.relevance.end(), 1) > 0) {
      const auto hb = hoeffding_bounds(s, 0.05);
      double violation = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        violation = std::max(violation, hb.rho[i] - hb.tau[i]);
        violation = std::max(violation, -hb.rho[i]);
      }
      violation = std::max(violation, hb.prs_bound - hb.ips_bound);
      record(bounds, std::max(0.0, violation), violation <= 0.0);
    }

    // Logistic loss gradient with respect to linear weights.
    const std::size_t dim = 5;
    std::vector<double> fi(dim), fj(dim), w(dim);
    for (std::size_t f = 0; f < dim; ++f) {
      fi[f] = normal(rng);
      fj[f] = normal(rng);
      w[f] = normal(rng);
    }
    const double pair_w = 2.0 * unit(rng);
    const auto loss = [&](std::span<const double> x) {
      double si = 0.0, sj = 0.0;
      for (std::size_t f = 0; f < dim; ++f) {
        si += x[f] * fi[f];
        sj += x[f] * fj[f];
      }
      return pairwise_logistic_loss(si, sj, pair_w);
    };
    const auto grad = [&](std::span<const double> x) {
      return logistic_gradient(fi, fj, x, pair_w);
    };
    const double err_l = fd_gradient_check(loss, grad, w);
    record(logistic, err_l, err_l < 1e-5);

    // Lambda gradients against the smoothed surrogate with frozen deltas.
    ClickSession session;
    const std::size_t m = 3 + t % 6;
    session.presented.resize(m);
    std::iota(session.presented.begin(), session.presented.end(), 0);
    session.clicks.assign(m, 0);
    session.propensities.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      session.clicks[k] = unit(rng) < 0.4;
      session.propensities[k] = observation_propensity(k + 1, 1.0);
    }
    session.clicks[0] = 1;
    session.clicks[m - 1] = 0;
    const auto pairs = generate_pairs(session, PairStrategy::kClickedVsNonClicked, prs);
    std::vector<double> scores(m);
    for (auto& v : scores) v = normal(rng);
    const double sigma = 0.5 + 1.5 * unit(rng);
    const auto dz = swap_ndcg_deltas(session, pairs, scores);
    const auto surrogate = [&](std::span<const double> x) {
      return lambda_surrogate_loss(pairs, dz, x, sigma);
    };
    const auto lambda = [&](std::span<const double> x) {
      return lambda_gradients(session, pairs, x, sigma).lambda;
    };
    const double err_lambda = fd_gradient_check(surrogate, lambda, scores);
    record(lambdas, err_lambda, err_lambda < 1e-5);
  }
  return {unbiased, ips_form, prs_form, bounds, logistic, lambdas};
}

bool all_passed(const std::vector<OracleCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const OracleCheck& c) { return c.passed; });
}

void print_oracle_report(const std::vector<OracleCheck>& checks, std::ostream& out) {
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  trials=" << c.trials
        << "  worst=" << c.worst;
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
  }
}

}  // namespace prsrank
