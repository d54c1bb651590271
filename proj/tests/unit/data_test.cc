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

#include <gtest/gtest.h>

#include <set>
#include <sstream>

namespace prsrank {
namespace {

TEST(ParseSvmlight, ReadsSparseLineWithZeroFill) {
  std::istringstream in("2 qid:7 1:0.5 3:1.0\n");
  const Dataset d = parse_svmlight(in);
  ASSERT_EQ(d.queries.size(), 1u);
  EXPECT_EQ(d.queries[0].qid, "7");
  ASSERT_EQ(d.queries[0].docs.size(), 1u);
  EXPECT_EQ(d.queries[0].docs[0].graded_label, 2);
  EXPECT_EQ(d.queries[0].docs[0].features, (std::vector<double>{0.5, 0.0, 1.0}));
  EXPECT_EQ(d.feature_dim, 3u);
}

TEST(ParseSvmlight, GroupsByQidInFirstAppearanceOrder) {
  std::istringstream in(
      "1 qid:b 1:1\n"
      "0 qid:b 1:2 # trailing comment\n"
      "\n"
      "2 qid:a 2:3\n"
      "0 qid:a 1:4\n");
  const Dataset d = parse_svmlight(in);
  ASSERT_EQ(d.queries.size(), 2u);
  EXPECT_EQ(d.queries[0].qid, "b");
  EXPECT_EQ(d.queries[1].qid, "a");
  EXPECT_EQ(d.queries[0].size(), 2u);
  EXPECT_EQ(d.queries[1].docs[0].features, (std::vector<double>{0.0, 3.0}));
  // Three-grade corpus: threshold 1.
  EXPECT_EQ(d.binarization_threshold, 1);
  EXPECT_EQ(d.queries[1].binary_relevance, (std::vector<std::uint8_t>{1, 0}));
}

TEST(ParseSvmlight, ErrorNamesTheLine) {
  std::istringstream in("1 qid:1 1:1\nx qid:7 1:a\n");
  try {
    parse_svmlight(in, "toy.txt");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("toy.txt:2"), std::string::npos);
  }
}

TEST(ParseSvmlight, RejectsMalformedInput) {
  for (const char* text : {"1 1:0.5\n", "1 qid:1 1:nan\n", "1 qid:1 2:1 1:1\n",
                           "1 qid:1 0:1\n", "1 qid:1 a\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_svmlight(in), ParseError) << text;
  }
  std::istringstream empty("# nothing\n\n");
  EXPECT_THROW(parse_svmlight(empty), ParseError);
}

TEST(ParseSvmlight, WriteRoundTripIsExact) {
  Dataset d = make_synthetic_dataset(
      SyntheticCorpusSpec{.num_queries = 5, .docs_per_query = 6, .feature_dim = 7,
                          .informative_features = 3},
      3);
  std::stringstream buf;
  write_svmlight(d, buf);
  const Dataset back = parse_svmlight(buf);
  ASSERT_EQ(back.queries.size(), d.queries.size());
  for (std::size_t q = 0; q < d.queries.size(); ++q) {
    EXPECT_EQ(back.queries[q].qid, d.queries[q].qid);
    for (std::size_t i = 0; i < d.queries[q].size(); ++i) {
      EXPECT_EQ(back.queries[q].docs[i].graded_label, d.queries[q].docs[i].graded_label);
      // Trailing zero features may shrink the parsed dimension.
      const auto& a = d.queries[q].docs[i].features;
      const auto& b = back.queries[q].docs[i].features;
      for (std::size_t f = 0; f < a.size(); ++f) {
        EXPECT_EQ(f < b.size() ? b[f] : 0.0, a[f]);
      }
    }
  }
}

Dataset graded(std::vector<int> grades) {
  Dataset d;
  d.feature_dim = 1;
  QueryGroup q;
  q.qid = "1";
  for (int g : grades) q.docs.push_back({{0.0}, g});
  d.queries.push_back(q);
  return d;
}

TEST(Binarize, FiveGradeThresholdThree) {
  const Dataset d = binarize(graded({0, 1, 2, 3, 4}), 3);
  EXPECT_EQ(d.queries[0].binary_relevance, (std::vector<std::uint8_t>{0, 0, 0, 1, 1}));
  EXPECT_EQ(default_binarization_threshold(4), 3);
}

TEST(Binarize, ThreeGradeThresholdOne) {
  const Dataset d = binarize(graded({0, 1, 2}), 1);
  EXPECT_EQ(d.queries[0].binary_relevance, (std::vector<std::uint8_t>{0, 1, 1}));
  EXPECT_EQ(default_binarization_threshold(2), 1);
}

TEST(Binarize, AllZeroGrades) {
  const Dataset d = binarize(graded({0, 0, 0}), 1);
  EXPECT_EQ(d.queries[0].binary_relevance, (std::vector<std::uint8_t>{0, 0, 0}));
  EXPECT_EQ(d.queries[0].num_relevant(), 0u);
}

Dataset many_queries(std::size_t n) {
  Dataset d;
  d.feature_dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    QueryGroup q;
    q.qid = std::to_string(i);
    q.docs.push_back({{static_cast<double>(i)}, 0});
    q.binary_relevance = {0};
    d.queries.push_back(q);
  }
  return d;
}

TEST(SplitProduction, OnePercentOfHundred) {
  const auto s = split_production(many_queries(100), 0.01, 5);
  EXPECT_EQ(s.production.queries.size(), 1u);
  EXPECT_EQ(s.remainder.queries.size(), 99u);
}

TEST(SplitProduction, Deterministic) {
  const auto a = split_production(many_queries(50), 0.2, 9);
  const auto b = split_production(many_queries(50), 0.2, 9);
  ASSERT_EQ(a.production.queries.size(), b.production.queries.size());
  for (std::size_t i = 0; i < a.production.queries.size(); ++i) {
    EXPECT_EQ(a.production.queries[i].qid, b.production.queries[i].qid);
  }
}

TEST(SplitProduction, HalfOfFourIsAPartition) {
  const auto s = split_production(many_queries(4), 0.5, 1);
  EXPECT_EQ(s.production.queries.size(), 2u);
  EXPECT_EQ(s.remainder.queries.size(), 2u);
  std::set<std::string> seen;
  for (const auto* part : {&s.production, &s.remainder}) {
    for (const auto& q : part->queries) seen.insert(q.qid);
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(SplitProduction, RejectsBadArguments) {
  EXPECT_THROW(split_production(many_queries(1), 0.5, 1), std::invalid_argument);
  EXPECT_THROW(split_production(many_queries(10), 0.0, 1), std::invalid_argument);
  EXPECT_THROW(split_production(many_queries(10), 1.0, 1), std::invalid_argument);
}

TEST(Synthetic, DeterministicAndValid) {
  SyntheticCorpusSpec spec;
  spec.num_queries = 20;
  const Dataset a = make_synthetic_dataset(spec, 4);
  const Dataset b = make_synthetic_dataset(spec, 4);
  a.validate();
  EXPECT_EQ(a.queries.size(), 20u);
  EXPECT_EQ(a.feature_dim, spec.feature_dim);
  EXPECT_EQ(a.queries[7].docs[3].features, b.queries[7].docs[3].features);
  EXPECT_GT(a.max_grade(), 0);
  spec.informative_features = 2;
  EXPECT_THROW(make_synthetic_dataset(spec, 4), std::invalid_argument);
}

}  // namespace
}  // namespace prsrank
