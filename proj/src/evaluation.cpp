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

#include "asr/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace asr {

std::string_view rank_mode_name(RankMode m) {
  return m == RankMode::kFiltered ? "filtered" : "raw";
}

namespace {

// 1 + #{e : scores[e] > scores[target], not filtered}.
template <typename IsFiltered>
std::size_t count_rank(const Vector& scores, EntityId target, IsFiltered&& is_filtered) {
  const double s = scores[static_cast<Eigen::Index>(target)];
  std::size_t rank = 1;
  for (Eigen::Index e = 0; e < scores.size(); ++e) {
    if (static_cast<EntityId>(e) == target) continue;
    if (scores[e] > s && !is_filtered(static_cast<EntityId>(e))) ++rank;
  }
  return rank;
}

}  // namespace

RankResult rank_triple(const ModelParams& params, const Triple& t, const KnowledgeGraph* filter,
                       RankMode mode) {
  const auto n = params.entities.cols();
  if (static_cast<Eigen::Index>(t.subject) >= n || static_cast<Eigen::Index>(t.object) >= n ||
      static_cast<Eigen::Index>(t.relation) >= params.relations.cols()) {
    throw UnknownSymbolError("triple refers to an id outside the model");
  }
  if (mode == RankMode::kFiltered && filter == nullptr)
    throw ConfigError("filtered ranking needs a filter graph");
  const auto theta = params.relation(t.relation);
  const bool filtered = mode == RankMode::kFiltered;

  RankResult r;
  r.triple = t;
  r.mode = mode;

  const Vector subj_scores =
      params.entities.transpose() * subject_weights(params.kind, theta, params.entity(t.object));
  r.subject_rank = count_rank(subj_scores, t.subject, [&](EntityId e) {
    return filtered && filter->contains(Triple{t.relation, e, t.object});
  });

  const Vector obj_scores =
      params.entities.transpose() * object_weights(params.kind, theta, params.entity(t.subject));
  r.object_rank = count_rank(obj_scores, t.object, [&](EntityId e) {
    return filtered && filter->contains(Triple{t.relation, t.subject, e});
  });
  return r;
}

std::vector<RankResult> rank_triples(const ModelParams& params, const std::vector<Triple>& triples,
                                     const KnowledgeGraph* filter, RankMode mode) {
  std::vector<RankResult> out;
  out.reserve(triples.size());
  for (const auto& t : triples) out.push_back(rank_triple(params, t, filter, mode));
  return out;
}

MetricsReport metrics(const std::vector<RankResult>& ranks, const std::vector<std::size_t>& ks,
                      std::string partition) {
  if (ranks.empty()) throw ConfigError("metrics need at least one ranked triple");
  MetricsReport m;
  m.partition = std::move(partition);
  m.n_triples = ranks.size();
  const double n = 2.0 * static_cast<double>(ranks.size());
  double rr = 0.0;
  for (const auto& r : ranks)
    rr += 1.0 / static_cast<double>(r.subject_rank) + 1.0 / static_cast<double>(r.object_rank);
  m.mrr = rr / n;
  for (std::size_t k : ks) {
    std::size_t hit = 0;
    for (const auto& r : ranks) hit += (r.subject_rank <= k) + (r.object_rank <= k);
    m.hits[k] = static_cast<double>(hit) / n;
  }
  return m;
}

double auc_pr(const std::vector<ScoredLabel>& scored) {
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scored[a].score > scored[b].score; });
  double sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (scored[order[i]].label > 0) {
      ++positives;
      sum += static_cast<double>(positives) / static_cast<double>(i + 1);
    }
  }
  if (positives == 0) throw ConfigError("average precision is undefined without positives");
  return sum / static_cast<double>(positives);
}

TestPartition partition_test(const DatasetSplit& split, const std::vector<Clause>& clauses) {
  const KnowledgeGraph premises = merge_graphs({&split.train, &split.valid});
  const ChainResult chain = forward_chain(premises, clauses, split.vocab);
  std::vector<Triple> derived_ii, derived_i;
  for (const auto& t : split.test.triples()) {
    if (chain.facts.contains(t)) {
      derived_ii.push_back(t);
    } else {
      derived_i.push_back(t);
    }
  }

  TestPartition p;
  p.derived_test_II = derived_ii.size();
  auto it_i = split.test_partitions.find("Test-I");
  auto it_ii = split.test_partitions.find("Test-II");
  if (it_i != split.test_partitions.end() && it_ii != split.test_partitions.end()) {
    p.shipped = true;
    p.test_I = it_i->second;
    p.test_II = it_ii->second;
    return p;
  }
  p.test_I = KnowledgeGraph(std::move(derived_i));
  p.test_II = KnowledgeGraph(std::move(derived_ii));
  return p;
}

void write_metric(std::ostream& out, const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  out << key << '\t' << buf << '\n';
}

void write_metric(std::ostream& out, const std::string& key, std::size_t value) {
  out << key << '\t' << value << '\n';
}

}  // namespace asr
