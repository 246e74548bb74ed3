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

#include "asr/training.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <optional>
#include <string>
#include <thread>

namespace asr {

void TrainingConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid training config: " + what); };
  if (dim < 1) fail("dim must be >= 1");
  if (!(margin > 0.0)) fail("margin must be > 0");
  if (!(alpha >= 0.0)) fail("alpha must be >= 0");
  if (tau < 1) fail("tau must be >= 1");
  if (tau_a < 1) fail("tau_a must be >= 1");
  if (tau_d < 1) fail("tau_d must be >= 1");
  if (!(lr > 0.0)) fail("lr must be > 0");
  if (!(lr_a > 0.0)) fail("lr_a must be > 0");
  if (restarts_a < 1) fail("restarts_a must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
}

Triple corrupt(const Triple& t, std::size_t num_entities, std::mt19937_64& rng, CorruptSide side) {
  if (num_entities < 2) throw ConfigError("cannot corrupt a triple with fewer than 2 entities");
  // Draw from |E| - 1 values and skip over the original.
  std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(num_entities - 2));
  Triple out = t;
  EntityId& slot = side == CorruptSide::kSubject ? out.subject : out.object;
  const EntityId original = slot;
  EntityId e = pick(rng);
  if (e >= original) ++e;
  slot = e;
  return out;
}

double accumulate_fact_loss_grads(const std::vector<TrainingBatchItem>& batch,
                                  const ModelParams& params, double margin, Matrix& d_entities,
                                  Matrix& d_relations) {
  double loss = 0.0;
  for (const auto& item : batch) {
    const Triple& t = item.triple;
    const double y = item.label > 0 ? 1.0 : -1.0;
    const double l = margin - y * params.score(t);
    if (l <= 0.0) continue;
    loss += l;
    Eigen::Ref<Vector> dr = d_relations.col(static_cast<Eigen::Index>(t.relation));
    Eigen::Ref<Vector> ds = d_entities.col(static_cast<Eigen::Index>(t.subject));
    Eigen::Ref<Vector> d_o = d_entities.col(static_cast<Eigen::Index>(t.object));
    accumulate_score_gradient(params.kind, params.relation(t.relation), params.entity(t.subject),
                              params.entity(t.object), -y, dr, ds, d_o);
  }
  return loss;
}

FactLossResult fact_loss_and_grads(const std::vector<TrainingBatchItem>& batch,
                                   const ModelParams& params, double margin) {
  FactLossResult r;
  r.d_entities = Matrix::Zero(params.entities.rows(), params.entities.cols());
  r.d_relations = Matrix::Zero(params.relations.rows(), params.relations.cols());
  r.loss = accumulate_fact_loss_grads(batch, params, margin, r.d_entities, r.d_relations);
  return r;
}

AdaGradState AdaGradState::zeros_like(const ModelParams& params, double lr) {
  AdaGradState s;
  s.lr = lr;
  s.acc_entities = Matrix::Zero(params.entities.rows(), params.entities.cols());
  s.acc_relations = Matrix::Zero(params.relations.rows(), params.relations.cols());
  return s;
}

void adagrad_step(ModelParams& params, const Matrix& d_entities, const Matrix& d_relations,
                  AdaGradState& state, const std::vector<Eigen::Index>& touched) {
  for (Eigen::Index j : touched) {
    adagrad_update(params.entities.col(j), d_entities.col(j), state.acc_entities.col(j), state.lr);
  }
  adagrad_update(params.relations, d_relations, state.acc_relations, state.lr);
}

void adagrad_step(ModelParams& params, const Matrix& d_entities, const Matrix& d_relations,
                  AdaGradState& state) {
  adagrad_update(params.entities, d_entities, state.acc_entities, state.lr);
  adagrad_update(params.relations, d_relations, state.acc_relations, state.lr);
}

std::uint64_t adversary_stream_seed(std::uint64_t seed, std::size_t epoch, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(index),
                    0x41535251u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

namespace {

constexpr int kMaxNegativeDraws = 16;

// A corruption that is not a training fact, or nothing if none was found.
std::optional<Triple> draw_negative(const Triple& t, const KnowledgeGraph& train,
                                    std::size_t num_entities, std::mt19937_64& rng,
                                    CorruptSide side) {
  for (int i = 0; i < kMaxNegativeDraws; ++i) {
    Triple c = corrupt(t, num_entities, rng, side);
    if (!train.contains(c)) return c;
  }
  return std::nullopt;
}

struct ClauseSlot {
  BoundClause bound;
  bool closed_form = false;
  AdversarialSet set;
};

void run_adversaries(std::vector<ClauseSlot>& slots, const ModelParams& params,
                     const TrainingConfig& cfg, std::size_t epoch) {
  AdversaryOptions opts;
  opts.steps = cfg.tau_a;
  opts.learning_rate = cfg.lr_a;
  opts.restarts = cfg.restarts_a;
  opts.tnorm = cfg.tnorm;
  auto work = [&](std::size_t i) {
    if (slots[i].closed_form) return;
    std::mt19937_64 rng(adversary_stream_seed(cfg.seed, epoch, i));
    slots[i].set = find_adversarial_set(slots[i].bound, params, cfg.subspace, opts, rng);
  };
  const std::size_t workers = std::min(cfg.threads, slots.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < slots.size(); ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < slots.size(); i += workers) work(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double add_clause_grads(std::vector<ClauseSlot>& slots, const ModelParams& params,
                        const TrainingConfig& cfg, Matrix& d_relations) {
  double total = 0.0;
  for (auto& slot : slots) {
    if (slot.closed_form) {
      const ClosedFormResult cf = closed_form_max_violation(slot.bound, params, cfg.subspace);
      total += cf.value;
      if (cf.value > 0.0) {
        for (const auto& [r, g] : cf.wrt_relations)
          d_relations.col(static_cast<Eigen::Index>(r)) += cfg.alpha * g;
      }
    } else {
      total += accumulate_inconsistency_relation_grads(slot.bound, slot.set, params, cfg.tnorm,
                                                       cfg.alpha, d_relations);
    }
  }
  return total;
}

}  // namespace

TrainingResult train(const DatasetSplit& split, const std::vector<Clause>& clauses,
                     const TrainingConfig& config) {
  config.validate();
  if (split.train.empty()) throw ConfigError("training graph is empty");
  const std::size_t n_ent = split.vocab.num_entities();

  std::vector<ClauseSlot> slots;
  if (config.alpha > 0.0) {
    for (const auto& c : clauses) {
      ClauseSlot s;
      try {
        s.bound = bind_clause(c, split.vocab);
      } catch (const UnknownSymbolError& e) {
        throw ConfigError(std::string("clause '") + c.to_string() + "': " + e.what());
      }
      s.closed_form = config.closed_form && has_closed_form(s.bound.shape);
      slots.push_back(std::move(s));
    }
  } else {
    // Still reject bad clause files, but keep the run identical to one
    // without clauses.
    for (const auto& c : clauses) {
      try {
        (void)bind_clause(c, split.vocab);
      } catch (const UnknownSymbolError& e) {
        throw ConfigError(std::string("clause '") + c.to_string() + "': " + e.what());
      }
    }
  }

  std::mt19937_64 rng(config.seed);
  TrainingResult result;
  result.params = init_params(split.vocab, config.model_kind, config.dim, config.subspace, rng);
  ModelParams& params = result.params;
  AdaGradState state = AdaGradState::zeros_like(params, config.lr);

  const auto& positives = split.train.triples();
  std::vector<std::size_t> order(positives.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  Matrix d_entities = Matrix::Zero(params.entities.rows(), params.entities.cols());
  Matrix d_relations = Matrix::Zero(params.relations.rows(), params.relations.cols());
  std::vector<char> touched_flag(n_ent, 0);
  std::vector<Eigen::Index> touched;
  std::vector<TrainingBatchItem> items;

  for (std::size_t epoch = 0; epoch < config.tau; ++epoch) {
    if (!slots.empty()) run_adversaries(slots, params, config, epoch);

    double epoch_fact = 0.0, epoch_clause = 0.0;
    for (std::size_t d = 0; d < config.tau_d; ++d) {
      project_columns(params.entities, config.subspace);
      std::shuffle(order.begin(), order.end(), rng);
      items.clear();
      for (std::size_t idx : order) {
        const Triple& pos = positives[idx];
        items.push_back({pos, +1});
        for (std::size_t n = 0; n < config.negatives_per_positive; ++n) {
          for (CorruptSide side : {CorruptSide::kSubject, CorruptSide::kObject}) {
            if (auto neg = draw_negative(pos, split.train, n_ent, rng, side)) {
              items.push_back({*neg, -1});
            }
          }
        }
      }

      epoch_fact = 0.0;
      epoch_clause = 0.0;
      for (std::size_t begin = 0; begin < items.size(); begin += config.batch_size) {
        const std::size_t end = std::min(items.size(), begin + config.batch_size);
        const std::vector<TrainingBatchItem> batch(items.begin() + static_cast<long>(begin),
                                                   items.begin() + static_cast<long>(end));
        for (Eigen::Index j : touched) {
          d_entities.col(j).setZero();
          touched_flag[static_cast<std::size_t>(j)] = 0;
        }
        touched.clear();
        d_relations.setZero();
        for (const auto& it : batch) {
          for (EntityId e : {it.triple.subject, it.triple.object}) {
            if (!touched_flag[e]) {
              touched_flag[e] = 1;
              touched.push_back(static_cast<Eigen::Index>(e));
            }
          }
        }
        std::sort(touched.begin(), touched.end());
        epoch_fact +=
            accumulate_fact_loss_grads(batch, params, config.margin, d_entities, d_relations);
        if (!slots.empty()) epoch_clause = add_clause_grads(slots, params, config, d_relations);
        adagrad_step(params, d_entities, d_relations, state, touched);
      }
    }
    result.fact_loss.push_back(epoch_fact);
    result.clause_loss.push_back(epoch_clause);
  }
  project_columns(params.entities, config.subspace);
  return result;
}

}  // namespace asr
