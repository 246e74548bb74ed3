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

// Random knowledge bases for clause-template experiments.
//
// Facts are sampled over random entity pairs, clauses of one template are
// drawn over distinct relations, training facts derivable through the
// clauses are pruned, and the facts the clauses would add become the
// positive test items, each paired with one corrupted negative.

#ifndef ASR_SYNTHETIC_HPP_
#define ASR_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "asr/clause.hpp"
#include "asr/graph.hpp"
#include "asr/training.hpp"

namespace asr {

struct SyntheticSpec {
  std::size_t n_entities = 30;
  std::size_t n_relations = 15;
  double pair_prob = 0.1;
  double fact_prob = 0.1;
  std::size_t n_clauses_per_type = 10;
  ClauseTemplate shape = ClauseTemplate::kSymmetry;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticInstance {
  Vocabulary vocab;
  KnowledgeGraph train;
  std::vector<Clause> clauses;
  std::vector<Triple> test_pos;
  std::vector<Triple> test_neg;  // test_neg[i] corrupts test_pos[i]
  std::size_t sampled_facts = 0;  // before pruning
  std::uint64_t seed_used = 0;
};

inline constexpr std::size_t kMaxSyntheticAttempts = 100;

/// Deterministic per spec.seed. When an instance has no derivable fact the
/// generator retries with derived seeds, up to kMaxSyntheticAttempts.
SyntheticInstance generate(const SyntheticSpec& spec);

/// Writes train.tsv, rules.txt, test_pos.tsv and test_neg.tsv into `dir`.
void write_instance(const SyntheticInstance& inst, const std::filesystem::path& dir);

/// Trains on the instance and returns the average precision of the test items.
double evaluate_instance(const SyntheticInstance& inst, const TrainingConfig& config);

struct ReplicateResult {
  std::vector<double> auc_pr;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single run
};

/// Run i uses spec.seed + i for the instance and config.seed + i for training.
ReplicateResult run_replicate(const SyntheticSpec& spec, const TrainingConfig& config,
                              std::size_t n_runs);

}  // namespace asr

#endif  // ASR_SYNTHETIC_HPP_
