/*
 * Copyright 2026 The ASR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <sstream>

#include "asr/evaluation.hpp"

namespace asr {
namespace {

// theta = (0.9, 1), subject e0 = (1, 0): object scores are 0.9 * h_o(0).
ModelParams three_entities() {
  ModelParams p;
  p.kind = ModelKind::kDistMult;
  p.dim = 2;
  p.entities.resize(2, 3);
  p.entities << 1.0, 5.0 / 9.0, 1.0 / 9.0, 0.0, 0.0, 0.0;
  p.relations.resize(2, 1);
  p.relations << 0.9, 1.0;
  return p;
}

TEST(RankTriple, HandInstance) {
  const ModelParams p = three_entities();
  const Triple t{0, 0, 1};
  EXPECT_DOUBLE_EQ(p.score(t), 0.5);
  EXPECT_DOUBLE_EQ(p.score(Triple{0, 0, 0}), 0.9);
  EXPECT_DOUBLE_EQ(p.score(Triple{0, 0, 2}), 0.1);
  EXPECT_EQ(rank_triple(p, t, nullptr, RankMode::kRaw).object_rank, 2u);
}

TEST(RankTriple, FilteringKnownCompetitors) {
  const ModelParams p = three_entities();
  const Triple t{0, 0, 1};
  const KnowledgeGraph all({Triple{0, 0, 0}, Triple{0, 0, 2}, Triple{0, 1, 1}, Triple{0, 2, 1},
                            t});
  const RankResult r = rank_triple(p, t, &all, RankMode::kFiltered);
  EXPECT_EQ(r.object_rank, 1u);
  EXPECT_EQ(r.subject_rank, 1u);
  EXPECT_THROW(rank_triple(p, t, nullptr, RankMode::kFiltered), ConfigError);
}

TEST(RankTriple, StrictlyHighestIsRankOne) {
  ModelParams p = three_entities();
  p.entities.col(1) << 2.0, 0.0;
  const RankResult r = rank_triple(p, Triple{0, 1, 1}, nullptr, RankMode::kRaw);
  EXPECT_EQ(r.subject_rank, 1u);
  EXPECT_EQ(r.object_rank, 1u);
}

TEST(Metrics, HandValues) {
  RankResult r;
  r.subject_rank = 1;
  r.object_rank = 4;
  const MetricsReport m = metrics({r}, {1, 3, 10});
  EXPECT_DOUBLE_EQ(m.mrr, 0.625);
  EXPECT_DOUBLE_EQ(m.hits.at(3), 0.5);
  EXPECT_DOUBLE_EQ(m.hits.at(1), 0.5);
  EXPECT_DOUBLE_EQ(m.hits.at(10), 1.0);

  RankResult top;
  const MetricsReport ones = metrics({top, top}, {1});
  EXPECT_EQ(ones.mrr, 1.0);
  EXPECT_EQ(ones.hits.at(1), 1.0);
  EXPECT_THROW(metrics({}, {1}), ConfigError);
}

TEST(AucPr, HandValues) {
  EXPECT_DOUBLE_EQ(auc_pr({{0.9, 1}, {0.8, 1}, {0.1, -1}}), 1.0);
  EXPECT_DOUBLE_EQ(auc_pr({{0.2, 1}, {0.8, -1}}), 0.5);
  EXPECT_NEAR(auc_pr({{0.9, 1}, {0.8, -1}, {0.7, 1}}), (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
  EXPECT_THROW(auc_pr({{0.2, -1}}), ConfigError);
}

TEST(AucPr, TiesKeepInputOrder) {
  EXPECT_DOUBLE_EQ(auc_pr({{0.5, 1}, {0.5, -1}}), 1.0);
  EXPECT_DOUBLE_EQ(auc_pr({{0.5, -1}, {0.5, 1}}), 0.5);
}

DatasetSplit uncle_split() {
  DatasetSplit s;
  s.train = KnowledgeGraph(load_triples("M\tsib\tJ\nJ\tpar\tP\n", s.vocab));
  s.test = KnowledgeGraph(load_triples("M\tuncle\tP\nP\tsib\tM\n", s.vocab));
  s.vocab.freeze();
  return s;
}

TEST(PartitionTest, UncleExample) {
  const DatasetSplit s = uncle_split();
  const auto rules = parse_rules("sib(X1,X2) & par(X2,X3) => uncle(X1,X3)\n");
  const TestPartition p = partition_test(s, rules);
  ASSERT_EQ(p.test_II.size(), 1u);
  EXPECT_EQ(s.vocab.relation_name(p.test_II.triples()[0].relation), "uncle");
  EXPECT_EQ(p.test_I.size(), 1u);
  EXPECT_FALSE(p.shipped);
}

TEST(PartitionTest, NoRulesMeansNoTestII) {
  const TestPartition p = partition_test(uncle_split(), {});
  EXPECT_TRUE(p.test_II.empty());
  EXPECT_EQ(p.test_I.size(), 2u);
}

TEST(PartitionTest, ShippedPartitionsPassThrough) {
  DatasetSplit s = uncle_split();
  const KnowledgeGraph one({s.test.triples()[1]}), two({s.test.triples()[0]});
  s.test_partitions.emplace("Test-I", one);
  s.test_partitions.emplace("Test-II", two);
  const TestPartition p = partition_test(s, parse_rules("sib(X,Y) => sib(Y,X)\n"));
  EXPECT_TRUE(p.shipped);
  EXPECT_EQ(p.test_I.triples(), one.triples());
  EXPECT_EQ(p.test_II.triples(), two.triples());
}

TEST(WriteMetric, TabSeparatedSixDecimals) {
  std::ostringstream os;
  write_metric(os, "mrr_filtered", 1.0);
  write_metric(os, "n_test", std::size_t{12});
  EXPECT_EQ(os.str(), "mrr_filtered\t1.000000\nn_test\t12\n");
}

}  // namespace
}  // namespace asr
