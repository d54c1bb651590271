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

#include "prsrank/oracle.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "prsrank/learn.h"
#include "prsrank/oracle_suite.h"

namespace prsrank {
namespace {

OracleSession make(std::vector<std::uint8_t> r, std::vector<double> p, PairLossFn delta) {
  OracleSession s;
  s.relevance = std::move(r);
  s.propensities = std::move(p);
  s.delta = std::move(delta);
  return s;
}

PairLossFn constant(double c) {
  return [c](std::size_t, std::size_t) { return c; };
}

TEST(ExactExpectedLoss, FullObservationIsDeterministicLoss) {
  const auto s = make({1, 0, 1, 0}, {1, 1, 1, 1}, logistic_pair_loss({0.3, -1.0, 0.2, 0.9}));
  double direct = 0.0;
  for (std::size_t i : {0u, 2u}) {
    for (std::size_t j : {1u, 3u}) direct += s.delta(i, j);
  }
  EXPECT_NEAR(exact_expected_loss(s, {SchemeKind::kIps}, PairStrategy::kClickedVsNonClicked),
              direct, 1e-14);
  EXPECT_NEAR(closed_form_prs_expectation(s), direct, 1e-14);
}

TEST(ExactExpectedLoss, PrsOnThreeDocuments) {
  const auto s = make({1, 0, 1}, {0.5, 0.5, 0.5}, logistic_pair_loss({0.1, 0.4, -0.3}));
  // Two relevant documents: the exact value carries the relevant residue.
  EXPECT_NEAR(exact_expected_loss(s, {SchemeKind::kPrs}, PairStrategy::kClickedVsNonClicked),
              closed_form_prs_expectation(s) + prs_relevant_residue(s), 1e-12);
  EXPECT_GT(prs_relevant_residue(s), 0.0);
  const auto single = make({1, 0, 0}, {0.5, 0.5, 0.5}, logistic_pair_loss({0.1, 0.4, -0.3}));
  EXPECT_NEAR(
      exact_expected_loss(single, {SchemeKind::kPrs}, PairStrategy::kClickedVsNonClicked),
      closed_form_prs_expectation(single), 1e-12);
  EXPECT_EQ(prs_relevant_residue(single), 0.0);
}

TEST(ExactExpectedLoss, NoRelevantDocumentsIsZero) {
  const auto s = make({0, 0, 0}, {1.0, 0.5, 0.25}, constant(1.0));
  EXPECT_EQ(exact_expected_loss(s, {SchemeKind::kIps}, PairStrategy::kClickedVsAll), 0.0);
  EXPECT_EQ(closed_form_ips_expectation(s), 0.0);
}

TEST(ClosedForms, ContaminationCases) {
  // Fully observed relevant docs: no contamination.
  EXPECT_EQ(ips_contamination(make({1, 1, 0}, {1.0, 1.0, 0.3}, constant(1.0))), 0.0);
  // Single relevant doc: no relevant-relevant pair.
  EXPECT_EQ(ips_contamination(make({0, 1, 0}, {1.0, 0.2, 0.3}, constant(1.0))), 0.0);
  EXPECT_DOUBLE_EQ(ips_contamination(make({1, 1}, {1.0, 0.5}, constant(1.0))), 0.5);
  // No irrelevant docs: the PRS closed form is empty.
  EXPECT_EQ(closed_form_prs_expectation(make({1, 1}, {1.0, 0.5}, constant(1.0))), 0.0);
}

TEST(ClosedForms, IpsMatchesEnumeration) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    auto r = random_oracle_session(rng, 8);
    const double exact = exact_expected_loss(r.session, {SchemeKind::kIps},
                                             PairStrategy::kClickedVsNonClicked);
    EXPECT_TRUE(close_enough(exact, closed_form_ips_expectation(r.session), 1e-10));
  }
}

TEST(ClosedForms, PrsPlusResidueMatchesEnumeration) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    auto r = random_oracle_session(rng, 8);
    const double exact = exact_expected_loss(r.session, {SchemeKind::kPrs},
                                             PairStrategy::kClickedVsNonClicked);
    EXPECT_TRUE(close_enough(
        exact, closed_form_prs_expectation(r.session) + prs_relevant_residue(r.session), 1e-10));
  }
}

TEST(PointwiseUnbiasedness, Cases) {
  const auto full = make({1, 0, 1}, {1, 1, 1}, constant(1.0));
  const std::vector<double> per_doc = {0.5, 2.0, 1.5};
  const auto c = pointwise_ips_unbiasedness(full, per_doc);
  EXPECT_DOUBLE_EQ(c.estimate_expectation, 2.0);
  EXPECT_DOUBLE_EQ(c.true_risk, 2.0);
  const auto partial = make({1, 0, 1}, {0.9, 0.4, 0.2}, constant(1.0));
  const auto zero = pointwise_ips_unbiasedness(partial, std::vector<double>(3, 0.0));
  EXPECT_EQ(zero.estimate_expectation, 0.0);
  EXPECT_EQ(zero.true_risk, 0.0);
  const auto u = pointwise_ips_unbiasedness(partial, per_doc);
  EXPECT_NEAR(u.estimate_expectation, u.true_risk, 1e-12);
  EXPECT_THROW(pointwise_ips_unbiasedness(partial, std::vector<double>(2, 1.0)),
               std::invalid_argument);
}

TEST(HoeffdingBounds, Cases) {
  const auto zero = hoeffding_bounds(make({1, 0, 1}, {0.5, 0.4, 0.2}, constant(0.0)), 0.05);
  EXPECT_EQ(zero.prs_bound, 0.0);
  EXPECT_EQ(zero.ips_bound, 0.0);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 500; ++t) {
    auto r = random_oracle_session(rng, 8);
    if (r.session.relevance == std::vector<std::uint8_t>(r.session.size(), 0)) continue;
    const auto b = hoeffding_bounds(r.session, 0.05);
    EXPECT_LE(b.prs_bound, b.ips_bound);
    for (std::size_t i = 0; i < r.session.size(); ++i) {
      EXPECT_GE(b.rho[i], 0.0);
      EXPECT_LE(b.rho[i], b.tau[i]);
    }
  }
  EXPECT_THROW(hoeffding_bounds(make({0, 0}, {0.5, 0.5}, constant(1.0)), 0.05),
               std::invalid_argument);
  EXPECT_THROW(hoeffding_bounds(make({1, 0}, {0.5, 0.5}, constant(1.0)), 1.0),
               std::invalid_argument);
}

TEST(HoeffdingBounds, DegenerateWeightsReduceToIrrelevantTerms) {
  // rho_i counts irrelevant docs only; with p_j = 1 on those and constant
  // delta, rho_i equals tau_i restricted to irrelevant documents.
  const auto s = make({1, 0, 0, 1}, {0.5, 1.0, 1.0, 0.25}, constant(2.0));
  const auto b = hoeffding_bounds(s, 0.1);
  EXPECT_DOUBLE_EQ(b.rho[0], (2.0 + 2.0) / 0.5);
  EXPECT_DOUBLE_EQ(b.rho[3], (2.0 + 2.0) / 0.25);
  EXPECT_DOUBLE_EQ(b.tau[0], 3 * 2.0 / 0.5);
}

TEST(OracleSession, Validation) {
  EXPECT_THROW(make({1, 0}, {0.5}, constant(1.0)).validate(), std::invalid_argument);
  EXPECT_THROW(make({1}, {0.0}, constant(1.0)).validate(), std::invalid_argument);
  EXPECT_THROW(make(std::vector<std::uint8_t>(17, 1), std::vector<double>(17, 0.5),
                    constant(1.0))
                   .validate(),
               std::invalid_argument);
  EXPECT_THROW(make({1}, {1.0}, nullptr).validate(), std::invalid_argument);
}

TEST(FdGradientCheck, LinearFunctionIsExactToRounding) {
  const std::vector<double> a = {1.5, -2.0, 0.25};
  auto f = [&](std::span<const double> x) {
    return a[0] * x[0] + a[1] * x[1] + a[2] * x[2];
  };
  auto g = [&](std::span<const double>) { return a; };
  EXPECT_LT(fd_gradient_check(f, g, std::vector<double>{0.3, 0.1, -4.0}), 1e-8);
  auto zf = [](std::span<const double>) { return 0.0; };
  auto zg = [](std::span<const double> x) { return std::vector<double>(x.size(), 0.0); };
  EXPECT_EQ(fd_gradient_check(zf, zg, std::vector<double>{1.0, 2.0}), 0.0);
}

TEST(OracleSuite, PassesAndDetectsMutation) {
  OracleSuiteOptions options;
  options.trials = 40;
  EXPECT_TRUE(all_passed(run_oracle_suite(options)));
  options.trials = 1;
  EXPECT_EQ(run_oracle_suite(options).size(), 6u);
  options.trials = 40;
  options.prs_closed_form = [](const OracleSession& s) {
    return closed_form_prs_expectation(s) + 1e-3 * closed_form_ips_expectation(s);
  };
  EXPECT_FALSE(all_passed(run_oracle_suite(options)));
}

}  // namespace
}  // namespace prsrank
