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

#include "prsrank/weighting.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "prsrank/simulate.h"

namespace prsrank {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(PairWeight, Examples) {
  EXPECT_DOUBLE_EQ(pair_weight({SchemeKind::kPrs, kInf}, 0.25, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(pair_weight({SchemeKind::kPrs, 1.0}, 0.25, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(pair_weight({SchemeKind::kIps}, 0.2, 0.7), 5.0);
  EXPECT_DOUBLE_EQ(pair_weight({SchemeKind::kIps}, 0.2, 0.1), 5.0);
  EXPECT_DOUBLE_EQ(pair_weight({SchemeKind::kNaive}, 0.01, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(pair_weight({SchemeKind::kPns}, 0.3, 0.4), 0.4);
}

TEST(PairWeight, ClipsInverseOnClickedSide) {
  WeightScheme ips{SchemeKind::kIps, kInf, 3.0};
  EXPECT_DOUBLE_EQ(pair_weight(ips, 0.1, 1.0), 3.0);
  WeightScheme prs{SchemeKind::kPrs, kInf, 3.0};
  EXPECT_DOUBLE_EQ(pair_weight(prs, 0.1, 0.5), 1.5);
}

TEST(PairWeight, PrsIsIpsTimesComparedPropensityWhenUnclipped) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> p(0.01, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double pi = p(rng), pj = p(rng);
    EXPECT_DOUBLE_EQ(pair_weight({SchemeKind::kPrs}, pi, pj),
                     pair_weight({SchemeKind::kIps}, pi, pj) * pj);
  }
}

TEST(PairWeight, RejectsPropensityOutsideUnitInterval) {
  EXPECT_THROW(pair_weight({SchemeKind::kIps}, 0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(pair_weight({SchemeKind::kIps}, 0.5, 1.5), std::invalid_argument);
}

ClickSession session(std::vector<std::uint8_t> clicks) {
  ClickSession s;
  s.clicks = std::move(clicks);
  for (std::size_t k = 0; k < s.clicks.size(); ++k) {
    s.presented.push_back(k);
    s.propensities.push_back(observation_propensity(k + 1, 1.0));
  }
  return s;
}

std::vector<std::pair<std::size_t, std::size_t>> ij(const std::vector<TrainingPair>& pairs) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& p : pairs) out.emplace_back(p.i, p.j);
  return out;
}

TEST(GeneratePairs, ClickedVsNonClicked) {
  const auto pairs = generate_pairs(session({1, 0, 0, 0}), PairStrategy::kClickedVsNonClicked,
                                    {SchemeKind::kNaive});
  EXPECT_EQ(ij(pairs), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {0, 3}}));
}

TEST(GeneratePairs, ClickedVsAllIncludesBothDirections) {
  const auto pairs =
      generate_pairs(session({1, 1, 0, 0}), PairStrategy::kClickedVsAll, {SchemeKind::kNaive});
  const auto got = ij(pairs);
  EXPECT_EQ(got.size(), 6u);
  EXPECT_NE(std::find(got.begin(), got.end(), std::make_pair<std::size_t, std::size_t>(0, 1)),
            got.end());
  EXPECT_NE(std::find(got.begin(), got.end(), std::make_pair<std::size_t, std::size_t>(1, 0)),
            got.end());
}

TEST(GeneratePairs, OracleDropsRelevantNonClicked) {
  ClickSession s = session({1, 0, 0});
  s.hidden_relevance = std::vector<std::uint8_t>{1, 1, 0};
  const auto pairs =
      generate_pairs(s, PairStrategy::kClickedVsIrrelevantOracle, {SchemeKind::kNaive});
  EXPECT_EQ(ij(pairs), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}}));
  EXPECT_THROW(generate_pairs(session({1, 0, 0}), PairStrategy::kClickedVsIrrelevantOracle,
                              {SchemeKind::kNaive}),
               std::invalid_argument);
}

TEST(GeneratePairs, CarriesSchemeWeightAndSessionIndex) {
  const auto pairs = generate_pairs(session({0, 1, 0, 0}), PairStrategy::kClickedVsNonClicked,
                                    {SchemeKind::kPrs}, 42);
  ASSERT_EQ(pairs.size(), 3u);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.session, 42u);
    EXPECT_DOUBLE_EQ(p.weight, (1.0 / double(p.j + 1)) / 0.5);
  }
}

TEST(GeneratePairs, NoClicksNoPairs) {
  EXPECT_TRUE(generate_pairs(session({0, 0, 0}), PairStrategy::kClickedVsAll,
                             {SchemeKind::kIps})
                  .empty());
}

TEST(Names, RoundTrip) {
  for (auto k : {SchemeKind::kNaive, SchemeKind::kIps, SchemeKind::kPns, SchemeKind::kPrs}) {
    EXPECT_EQ(parse_scheme_kind(to_string(k)), k);
  }
  for (auto s : {PairStrategy::kClickedVsAll, PairStrategy::kClickedVsNonClicked,
                 PairStrategy::kClickedVsIrrelevantOracle}) {
    EXPECT_EQ(parse_pair_strategy(to_string(s)), s);
  }
  EXPECT_EQ(parse_scheme_kind("PRS"), SchemeKind::kPrs);
  EXPECT_THROW(parse_scheme_kind("snips"), std::invalid_argument);
  EXPECT_THROW(parse_pair_strategy("pairwise"), std::invalid_argument);
}

}  // namespace
}  // namespace prsrank
