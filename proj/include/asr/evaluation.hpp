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

// Link-prediction ranking metrics and average precision.

#ifndef ASR_EVALUATION_HPP_
#define ASR_EVALUATION_HPP_

#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "asr/clause.hpp"
#include "asr/graph.hpp"
#include "asr/scoring.hpp"

namespace asr {

enum class RankMode { kRaw, kFiltered };

std::string_view rank_mode_name(RankMode m);

struct RankResult {
  Triple triple;
  std::size_t subject_rank = 1;
  std::size_t object_rank = 1;
  RankMode mode = RankMode::kRaw;
};

/// Rank = 1 + number of candidates scoring strictly higher than the target.
/// In filtered mode, candidates forming a triple in `filter` (other than the
/// target itself) are ignored. `filter` may be null in raw mode.
RankResult rank_triple(const ModelParams& params, const Triple& t, const KnowledgeGraph* filter,
                       RankMode mode);

std::vector<RankResult> rank_triples(const ModelParams& params, const std::vector<Triple>& triples,
                                     const KnowledgeGraph* filter, RankMode mode);

struct MetricsReport {
  double mrr = 0.0;
  std::map<std::size_t, double> hits;
  std::size_t n_triples = 0;
  std::string partition;
};

/// MRR and Hits@k over both the subject and the object rank of every result.
/// Throws ConfigError on an empty list.
MetricsReport metrics(const std::vector<RankResult>& ranks, const std::vector<std::size_t>& ks,
                      std::string partition = "");

struct ScoredLabel {
  double score = 0.0;
  int label = 1;  // +1 or -1
};

/// Average precision: entries sorted by descending score (stable), then the
/// mean of precision@i over the positions i holding a positive. Throws
/// ConfigError when there is no positive.
double auc_pr(const std::vector<ScoredLabel>& scored);

struct TestPartition {
  KnowledgeGraph test_I;
  KnowledgeGraph test_II;
  /// Size of the derived Test-II when shipped partitions were used instead.
  std::size_t derived_test_II = 0;
  bool shipped = false;
};

/// Test-II holds the test facts derivable from train + valid via the
/// clauses; Test-I the rest. Shipped partitions are returned unchanged.
TestPartition partition_test(const DatasetSplit& split, const std::vector<Clause>& clauses);

/// Writes `key<TAB>value` lines; values use six decimals.
void write_metric(std::ostream& out, const std::string& key, double value);
void write_metric(std::ostream& out, const std::string& key, std::size_t value);

}  // namespace asr

#endif  // ASR_EVALUATION_HPP_
