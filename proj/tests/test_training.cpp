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

#include <cmath>
#include <random>

#include "asr/synthetic.hpp"
#include "asr/training.hpp"

namespace asr {
namespace {

TEST(Corrupt, NeverReturnsTheOriginal) {
  std::mt19937_64 rng(0);
  const Triple t{0, 0, 1};
  for (int i = 0; i < 200; ++i) {
    const Triple s = corrupt(t, 3, rng, CorruptSide::kSubject);
    EXPECT_NE(s.subject, 0u);
    EXPECT_EQ(s.object, 1u);
    EXPECT_EQ(s.relation, 0u);
    const Triple o = corrupt(t, 3, rng, CorruptSide::kObject);
    EXPECT_NE(o.object, 1u);
    EXPECT_EQ(o.subject, 0u);
  }
  EXPECT_THROW(corrupt(t, 1, rng, CorruptSide::kSubject), ConfigError);
}

TEST(Corrupt, SeededSequenceRepeats) {
  std::mt19937_64 a(11), b(11);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(corrupt(Triple{0, 2, 3}, 10, a, CorruptSide::kObject),
              corrupt(Triple{0, 2, 3}, 10, b, CorruptSide::kObject));
  }
}

ModelParams one_dim(double theta, double h1, double h2) {
  ModelParams p;
  p.kind = ModelKind::kDistMult;
  p.dim = 1;
  p.entities.resize(1, 2);
  p.entities << h1, h2;
  p.relations.resize(1, 1);
  p.relations << theta;
  return p;
}

TEST(FactLoss, HingeCases) {
  // score = 1.5 * 1 * 1 = margin + 0.5
  const FactLossResult pos = fact_loss_and_grads({{Triple{0, 0, 1}, +1}}, one_dim(1.5, 1, 1), 1.0);
  EXPECT_EQ(pos.loss, 0.0);
  EXPECT_TRUE(pos.d_entities.isZero(0));
  const FactLossResult neg = fact_loss_and_grads({{Triple{0, 0, 1}, -1}}, one_dim(0.0, 1, 1), 1.0);
  EXPECT_EQ(neg.loss, 1.0);
  EXPECT_EQ(neg.d_relations(0, 0), 1.0);
}

TEST(AdaGrad, FirstStepAndZeroGradient) {
  Vector p = Vector::Constant(2, 1.0), acc = Vector::Zero(2);
  Vector g(2);
  g << 1.0, 0.0;
  adagrad_update(p, g, acc, 0.1);
  EXPECT_NEAR(p(0), 0.9, 1e-8);
  EXPECT_EQ(p(1), 1.0);
  EXPECT_EQ(acc(1), 0.0);
  EXPECT_EQ(acc(0), 1.0);
}

TEST(AdaGrad, StepsShrinkUnderRepeatedGradients) {
  Vector p = Vector::Zero(1), acc = Vector::Zero(1);
  const Vector g = Vector::Constant(1, 0.5);
  double prev_step = INFINITY;
  for (int i = 0; i < 10; ++i) {
    const double before = p(0);
    adagrad_update(p, g, acc, 0.1);
    const double step = before - p(0);
    EXPECT_LT(step, prev_step);
    prev_step = step;
  }
}

TEST(AdaGrad, SparseStepMatchesDenseOnTouchedColumns) {
  std::mt19937_64 rng(1);
  ModelParams a = init_params(5, 2, ModelKind::kDistMult, 3, Subspace::kUnitCube, rng);
  ModelParams b = a;
  Matrix de = Matrix::Zero(3, 5), dr = Matrix::Random(3, 2);
  de.col(1).setConstant(0.3);
  de.col(4).setConstant(-0.2);
  AdaGradState sa = AdaGradState::zeros_like(a, 0.1), sb = sa;
  adagrad_step(a, de, dr, sa, {1, 4});
  adagrad_step(b, de, dr, sb);
  EXPECT_EQ(a.entities, b.entities);
  EXPECT_EQ(a.relations, b.relations);
  EXPECT_EQ(sa.acc_entities, sb.acc_entities);
}

SyntheticInstance small_instance(ClauseTemplate shape, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.shape = shape;
  spec.seed = seed;
  return generate(spec);
}

DatasetSplit as_split(const SyntheticInstance& inst) {
  DatasetSplit s;
  s.vocab = inst.vocab;
  s.train = inst.train;
  return s;
}

TrainingConfig quick_config() {
  TrainingConfig c;
  c.dim = 5;
  c.tau = 3;
  c.tau_d = 2;
  c.seed = 7;
  return c;
}

TEST(Train, ZeroAlphaIgnoresClausesBitwise) {
  const SyntheticInstance inst = small_instance(ClauseTemplate::kImplication, 2);
  TrainingConfig c = quick_config();
  c.alpha = 0.0;
  const TrainingResult with = train(as_split(inst), inst.clauses, c);
  const TrainingResult without = train(as_split(inst), {}, c);
  EXPECT_EQ(with.params.entities, without.params.entities);
  EXPECT_EQ(with.params.relations, without.params.relations);
}

TEST(Train, DeterministicAndThreadIndependent) {
  const SyntheticInstance inst = small_instance(ClauseTemplate::kSymmetry, 3);
  TrainingConfig c = quick_config();
  c.alpha = 1.0;
  c.model_kind = ModelKind::kComplEx;
  const TrainingResult a = train(as_split(inst), inst.clauses, c);
  const TrainingResult b = train(as_split(inst), inst.clauses, c);
  c.threads = 3;
  const TrainingResult t = train(as_split(inst), inst.clauses, c);
  EXPECT_EQ(a.params.entities, b.params.entities);
  EXPECT_EQ(a.params.entities, t.params.entities);
  EXPECT_EQ(a.params.relations, t.params.relations);
  EXPECT_EQ(a.clause_loss, t.clause_loss);
}

TEST(Train, EntitiesEndInSubspace) {
  const SyntheticInstance inst = small_instance(ClauseTemplate::kInverseImplication, 4);
  for (auto sub : {Subspace::kUnitCube, Subspace::kUnitSphere}) {
    TrainingConfig c = quick_config();
    c.alpha = 1.0;
    c.subspace = sub;
    const TrainingResult r = train(as_split(inst), inst.clauses, c);
    for (Eigen::Index j = 0; j < r.params.entities.cols(); ++j)
      EXPECT_TRUE(in_subspace(r.params.entities.col(j), sub, 1e-12));
    EXPECT_EQ(r.fact_loss.size(), c.tau);
  }
}

TEST(Train, UnknownClausePredicateIsAConfigError) {
  const SyntheticInstance inst = small_instance(ClauseTemplate::kSymmetry, 5);
  const std::vector<Clause> bad = {parse_clause("nosuch(X,Y) => nosuch(Y,X)")};
  for (double alpha : {0.0, 1.0}) {
    TrainingConfig c = quick_config();
    c.alpha = alpha;
    EXPECT_THROW(train(as_split(inst), bad, c), ConfigError);
  }
}

TEST(TrainingConfig, Validation) {
  TrainingConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainingConfig{};
  c.dim = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainingConfig{};
  c.tau_a = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(AdversaryStreamSeed, DistinctPerEpochAndClause) {
  EXPECT_NE(adversary_stream_seed(0, 0, 0), adversary_stream_seed(0, 0, 1));
  EXPECT_NE(adversary_stream_seed(0, 0, 0), adversary_stream_seed(0, 1, 0));
  EXPECT_NE(adversary_stream_seed(0, 0, 0), adversary_stream_seed(1, 0, 0));
  EXPECT_EQ(adversary_stream_seed(5, 2, 3), adversary_stream_seed(5, 2, 3));
}

}  // namespace
}  // namespace asr
