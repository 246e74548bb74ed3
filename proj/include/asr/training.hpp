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

// Fact loss, negative sampling, AdaGrad and the outer minimax loop.

#ifndef ASR_TRAINING_HPP_
#define ASR_TRAINING_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "asr/adversary.hpp"
#include "asr/clause.hpp"
#include "asr/graph.hpp"
#include "asr/scoring.hpp"

namespace asr {

struct TrainingConfig {
  Eigen::Index dim = 20;
  double margin = 1.0;
  double alpha = 0.0;
  std::size_t tau = 100;
  std::size_t tau_a = 1;
  std::size_t tau_d = 10;
  double lr = 0.1;
  double lr_a = 1.0;
  Subspace subspace = Subspace::kUnitCube;
  ModelKind model_kind = ModelKind::kDistMult;
  TNorm tnorm = TNorm::kGodel;
  std::size_t negatives_per_positive = 1;
  bool closed_form = false;
  std::uint64_t seed = 0;
  std::size_t restarts_a = 1;
  std::size_t batch_size = 4096;  // items per AdaGrad step
  std::size_t threads = 1;        // workers for per-clause adversaries

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

enum class CorruptSide { kSubject, kObject };

/// Replaces one side with a uniformly drawn entity different from the
/// original. Throws ConfigError when num_entities < 2.
Triple corrupt(const Triple& t, std::size_t num_entities, std::mt19937_64& rng, CorruptSide side);

struct TrainingBatchItem {
  Triple triple;
  int label = 1;  // +1 or -1
};

/// Adds the subgradient of sum max(0, margin - y * score) into d_entities and
/// d_relations (both shaped like the params) and returns the loss.
double accumulate_fact_loss_grads(const std::vector<TrainingBatchItem>& batch,
                                  const ModelParams& params, double margin, Matrix& d_entities,
                                  Matrix& d_relations);

struct FactLossResult {
  double loss = 0.0;
  Matrix d_entities;
  Matrix d_relations;
};

FactLossResult fact_loss_and_grads(const std::vector<TrainingBatchItem>& batch,
                                   const ModelParams& params, double margin);

inline constexpr double kAdaGradEpsilon = 1e-8;

/// acc += g^2, param -= lr * g / (sqrt(acc) + eps), componentwise.
template <typename P, typename G, typename A>
void adagrad_update(Eigen::MatrixBase<P>& param, const Eigen::MatrixBase<G>& grad,
                    Eigen::MatrixBase<A>& acc, double lr, double eps = kAdaGradEpsilon) {
  acc.array() += grad.array().square();
  param.array() -= lr * grad.array() / (acc.array().sqrt() + eps);
}

template <typename P, typename G, typename A>
void adagrad_update(Eigen::MatrixBase<P>&& param, const Eigen::MatrixBase<G>& grad,
                    Eigen::MatrixBase<A>&& acc, double lr, double eps = kAdaGradEpsilon) {
  adagrad_update(param, grad, acc, lr, eps);
}

struct AdaGradState {
  double lr = 0.1;
  Matrix acc_entities;
  Matrix acc_relations;

  static AdaGradState zeros_like(const ModelParams& params, double lr);
};

/// Applies one AdaGrad step. Only the entity columns listed in `touched` are
/// updated (columns with zero gradient would be left unchanged anyway).
void adagrad_step(ModelParams& params, const Matrix& d_entities, const Matrix& d_relations,
                  AdaGradState& state, const std::vector<Eigen::Index>& touched);
void adagrad_step(ModelParams& params, const Matrix& d_entities, const Matrix& d_relations,
                  AdaGradState& state);

struct TrainingResult {
  ModelParams params;
  std::vector<double> fact_loss;    // last discriminator pass of each epoch
  std::vector<double> clause_loss;  // sum over clauses, unweighted, per epoch
};

/// Runs the minimax loop on split.train. Clauses must only mention relations
/// of split.vocab, else ConfigError is thrown before training starts.
TrainingResult train(const DatasetSplit& split, const std::vector<Clause>& clauses,
                     const TrainingConfig& config);

/// Seed of the random stream used by the adversary of clause `index` in
/// outer epoch `epoch`.
std::uint64_t adversary_stream_seed(std::uint64_t seed, std::size_t epoch, std::size_t index);

}  // namespace asr

#endif  // ASR_TRAINING_HPP_
