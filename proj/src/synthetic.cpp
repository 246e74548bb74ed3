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

#include "asr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "asr/evaluation.hpp"

namespace asr {

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid synthetic spec: " + what); };
  if (n_entities < 2) fail("n_entities must be >= 2");
  if (n_relations < 1) fail("n_relations must be >= 1");
  if (!(pair_prob > 0.0 && pair_prob <= 1.0)) fail("pair_prob must be in (0, 1]");
  if (!(fact_prob > 0.0 && fact_prob <= 1.0)) fail("fact_prob must be in (0, 1]");
  if (n_clauses_per_type < 1) fail("n_clauses_per_type must be >= 1");
  if (shape == ClauseTemplate::kGeneral) {
    throw UnsupportedTemplateError("synthetic data needs a concrete clause template");
  }
  std::size_t needed = 1;
  if (shape == ClauseTemplate::kImplication || shape == ClauseTemplate::kInverseImplication)
    needed = 2;
  if (shape == ClauseTemplate::kTransitivityGeneral) needed = 3;
  if (n_relations < needed) fail("template needs more distinct relations");
}

namespace {

std::string rel(std::size_t i) { return "r" + std::to_string(i); }

std::string clause_text(ClauseTemplate shape, const std::vector<std::size_t>& r) {
  switch (shape) {
    case ClauseTemplate::kSymmetry:
      return rel(r[0]) + "(X,Y) => " + rel(r[0]) + "(Y,X)";
    case ClauseTemplate::kImplication:
      return rel(r[0]) + "(X,Y) => " + rel(r[1]) + "(X,Y)";
    case ClauseTemplate::kInverseImplication:
      return rel(r[0]) + "(X,Y) => " + rel(r[1]) + "(Y,X)";
    case ClauseTemplate::kTransitivitySame:
      return rel(r[0]) + "(X,Y) & " + rel(r[0]) + "(Y,Z) => " + rel(r[0]) + "(X,Z)";
    case ClauseTemplate::kTransitivityGeneral:
      return rel(r[0]) + "(X,Y) & " + rel(r[1]) + "(Y,Z) => " + rel(r[2]) + "(X,Z)";
    case ClauseTemplate::kGeneral:
      break;
  }
  throw UnsupportedTemplateError("synthetic data needs a concrete clause template");
}

std::size_t slot_count(ClauseTemplate shape) {
  switch (shape) {
    case ClauseTemplate::kImplication:
    case ClauseTemplate::kInverseImplication:
      return 2;
    case ClauseTemplate::kTransitivityGeneral:
      return 3;
    default:
      return 1;
  }
}

// Number of distinct clauses the template admits over n relations.
double clause_capacity(ClauseTemplate shape, std::size_t n) {
  const double d = static_cast<double>(n);
  switch (slot_count(shape)) {
    case 2:
      return d * (d - 1);
    case 3:
      return d * (d - 1) * (d - 2);
    default:
      return d;
  }
}

std::uint64_t attempt_seed(std::uint64_t seed, std::size_t attempt) {
  if (attempt == 0) return seed;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(attempt), 0x53594e54u};
  std::uint32_t w[2];
  seq.generate(w, w + 2);
  return (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
}

SyntheticInstance generate_once(const SyntheticSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep_pair(spec.pair_prob), keep_fact(spec.fact_prob);

  SyntheticInstance inst;
  inst.seed_used = seed;
  for (std::size_t e = 0; e < spec.n_entities; ++e) inst.vocab.entity_id("e" + std::to_string(e));
  for (std::size_t r = 0; r < spec.n_relations; ++r) inst.vocab.relation_id(rel(r));
  inst.vocab.freeze();

  std::vector<Triple> facts;
  for (std::size_t s = 0; s < spec.n_entities; ++s) {
    for (std::size_t o = 0; o < spec.n_entities; ++o) {
      if (!keep_pair(rng)) continue;
      for (std::size_t r = 0; r < spec.n_relations; ++r) {
        if (keep_fact(rng)) {
          facts.push_back(Triple{static_cast<RelationId>(r), static_cast<EntityId>(s),
                                 static_cast<EntityId>(o)});
        }
      }
    }
  }
  inst.sampled_facts = facts.size();

  std::set<std::vector<std::size_t>> used;
  std::uniform_int_distribution<std::size_t> pick_rel(0, spec.n_relations - 1);
  const std::size_t slots = slot_count(spec.shape);
  while (inst.clauses.size() < spec.n_clauses_per_type) {
    std::vector<std::size_t> r;
    while (r.size() < slots) {
      const std::size_t c = pick_rel(rng);
      if (std::find(r.begin(), r.end(), c) == r.end()) r.push_back(c);
    }
    if (!used.insert(r).second) continue;
    inst.clauses.push_back(parse_clause(clause_text(spec.shape, r)));
  }

  // Greedy pruning in sorted order: a fact derivable from the rest is dropped.
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
  std::vector<char> alive(facts.size(), 1);
  for (std::size_t i = 0; i < facts.size(); ++i) {
    std::vector<Triple> rest;
    rest.reserve(facts.size());
    for (std::size_t j = 0; j < facts.size(); ++j)
      if (j != i && alive[j]) rest.push_back(facts[j]);
    const ChainResult chain = forward_chain(KnowledgeGraph(std::move(rest)), inst.clauses,
                                            inst.vocab);
    if (chain.facts.contains(facts[i])) alive[i] = 0;
  }
  std::vector<Triple> train;
  for (std::size_t i = 0; i < facts.size(); ++i)
    if (alive[i]) train.push_back(facts[i]);
  inst.train = KnowledgeGraph(std::move(train));

  const ChainResult derived = forward_chain(inst.train, inst.clauses, inst.vocab);
  inst.test_pos = derived.facts.triples();

  std::bernoulli_distribution side(0.5);
  for (const Triple& pos : inst.test_pos) {
    const CorruptSide s = side(rng) ? CorruptSide::kSubject : CorruptSide::kObject;
    bool found = false;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      const Triple neg = corrupt(pos, spec.n_entities, rng, s);
      if (!inst.train.contains(neg) && !derived.facts.contains(neg)) {
        inst.test_neg.push_back(neg);
        found = true;
      }
    }
    if (!found) throw ConfigError("could not draw a negative test item");
  }
  return inst;
}

}  // namespace

SyntheticInstance generate(const SyntheticSpec& spec) {
  spec.validate();
  if (static_cast<double>(spec.n_clauses_per_type) > clause_capacity(spec.shape, spec.n_relations))
    throw ConfigError("more clauses requested than the template admits");
  for (std::size_t attempt = 0; attempt < kMaxSyntheticAttempts; ++attempt) {
    SyntheticInstance inst = generate_once(spec, attempt_seed(spec.seed, attempt));
    if (!inst.test_pos.empty()) return inst;
  }
  throw ConfigError("no derivable test facts after " + std::to_string(kMaxSyntheticAttempts) +
                    " attempts");
}

void write_instance(const SyntheticInstance& inst, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_triples_file(dir / "train.tsv", inst.train.triples(), inst.vocab);
  write_triples_file(dir / "test_pos.tsv", inst.test_pos, inst.vocab);
  write_triples_file(dir / "test_neg.tsv", inst.test_neg, inst.vocab);
  std::ofstream rules(dir / "rules.txt");
  if (!rules) throw Error("cannot write " + (dir / "rules.txt").string());
  for (const auto& c : inst.clauses) rules << c.to_string() << '\n';
  if (!rules) throw Error("write failed: " + (dir / "rules.txt").string());
}

double evaluate_instance(const SyntheticInstance& inst, const TrainingConfig& config) {
  DatasetSplit split;
  split.vocab = inst.vocab;
  split.train = inst.train;
  const TrainingResult trained = train(split, inst.clauses, config);
  std::vector<ScoredLabel> scored;
  scored.reserve(inst.test_pos.size() + inst.test_neg.size());
  for (const auto& t : inst.test_pos) scored.push_back({trained.params.score(t), +1});
  for (const auto& t : inst.test_neg) scored.push_back({trained.params.score(t), -1});
  return auc_pr(scored);
}

ReplicateResult run_replicate(const SyntheticSpec& spec, const TrainingConfig& config,
                              std::size_t n_runs) {
  if (n_runs < 1) throw ConfigError("replicate needs at least one run");
  ReplicateResult out;
  for (std::size_t i = 0; i < n_runs; ++i) {
    SyntheticSpec s = spec;
    s.seed = spec.seed + i;
    TrainingConfig c = config;
    c.seed = config.seed + i;
    out.auc_pr.push_back(evaluate_instance(generate(s), c));
  }
  const double n = static_cast<double>(n_runs);
  out.mean = std::accumulate(out.auc_pr.begin(), out.auc_pr.end(), 0.0) / n;
  if (n_runs > 1) {
    double ss = 0.0;
    for (double v : out.auc_pr) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

}  // namespace asr
