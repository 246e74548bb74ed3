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

// Adversarial sets and inconsistency losses.
//
// An adversarial set binds every variable of a clause to a free embedding in
// the entity subspace. The inconsistency loss of a clause body => head on a
// set S is [score(body; S) - score(head; S)]_+, with the body scored by a
// t-norm over its atoms. Three ways of evaluating the worst case are
// provided: iterative projected gradient ascent over S, the analytic maximum
// for single-atom clauses (symmetry, implication, implication with swapped
// arguments), and exhaustive grounding over real entities for small graphs.

#ifndef ASR_ADVERSARY_HPP_
#define ASR_ADVERSARY_HPP_

#include <cstddef>
#include <map>
#include <random>
#include <string_view>
#include <optional>
#include <vector>

#include "asr/clause.hpp"
#include "asr/scoring.hpp"

namespace asr {

enum class TNorm { kGodel, kProduct };

std::string_view tnorm_name(TNorm t);
std::optional<TNorm> parse_tnorm_name(std::string_view name);

/// Column j holds the embedding bound to the clause's j-th variable.
struct AdversarialSet {
  Matrix embeddings;

  std::size_t size() const { return static_cast<std::size_t>(embeddings.cols()); }
  auto binding(std::size_t var) const { return embeddings.col(static_cast<Eigen::Index>(var)); }
};

using RelationGradient = std::map<RelationId, Vector>;

double atom_score(const BoundAtom& atom, const AdversarialSet& set, const ModelParams& params);

double body_score(const std::vector<BoundAtom>& body, const AdversarialSet& set,
                  const ModelParams& params, TNorm tnorm);

/// score(body) - score(head), before the hinge.
double violation(const BoundClause& clause, const AdversarialSet& set, const ModelParams& params,
                 TNorm tnorm);

double inconsistency_loss(const BoundClause& clause, const AdversarialSet& set,
                          const ModelParams& params, TNorm tnorm);

struct ClauseGradient {
  Matrix wrt_set;                  // same shape as the set's embeddings
  RelationGradient wrt_relations;  // only relations mentioned by the clause
};

/// Gradient of the violation (no hinge). The Goedel minimum routes the body
/// gradient to the first atom, in body order, attaining the minimum.
ClauseGradient violation_grads(const BoundClause& clause, const AdversarialSet& set,
                               const ModelParams& params, TNorm tnorm);

/// Subgradient of inconsistency_loss: zero whenever body - head <= 0,
/// otherwise equal to violation_grads.
ClauseGradient inconsistency_grads(const BoundClause& clause, const AdversarialSet& set,
                                   const ModelParams& params, TNorm tnorm);

/// Adds weight * d loss / d relations into `d_relations` (width x |R|) and
/// returns the loss value. Nothing is added when the loss is zero.
double accumulate_inconsistency_relation_grads(const BoundClause& clause,
                                               const AdversarialSet& set,
                                               const ModelParams& params, TNorm tnorm,
                                               double weight, Matrix& d_relations);

struct AdversaryOptions {
  std::size_t steps = 1;       // tau_a
  double learning_rate = 1.0;  // eta_a
  std::size_t restarts = 1;
  TNorm tnorm = TNorm::kGodel;
};

/// Runs `steps` projected gradient-ascent iterations on `set` in place: each
/// iteration projects every binding onto the subspace, evaluates the gradient
/// and takes a fixed step. The ascent direction is the gradient of the
/// violation, so sets that currently satisfy the clause still move towards a
/// violation. The result is projected once more before returning.
void ascend_adversarial_set(const BoundClause& clause, const ModelParams& params,
                            Subspace subspace, AdversarialSet& set, std::size_t steps,
                            double learning_rate, TNorm tnorm);

/// Initialises each binding with a uniformly drawn entity embedding, ascends,
/// and keeps the best of `restarts` runs (largest violation, first wins ties).
AdversarialSet find_adversarial_set(const BoundClause& clause, const ModelParams& params,
                                    Subspace subspace, const AdversaryOptions& options,
                                    std::mt19937_64& rng);

/// delta = theta_b - theta_r and zeta = theta_b - conj(theta_r). For real
/// embeddings zeta equals delta.
struct DeltaVector {
  Vector delta;
  Vector zeta;
};

DeltaVector delta_vector(ModelKind kind, const Eigen::Ref<const Vector>& theta_body,
                         const Eigen::Ref<const Vector>& theta_head);

bool has_closed_form(ClauseTemplate shape);

struct PairClosedForm {
  double value = 0.0;
  Vector d_body;  // subgradient w.r.t. the body relation embedding
  Vector d_head;  // subgradient w.r.t. the head relation embedding
};

/// Analytic max over h1, h2 in the subspace of the violation of
/// b(X1,X2) => r(X1,X2) (kImplication) or b(X1,X2) => r(X2,X1)
/// (kInverseImplication, kSymmetry), already clamped at zero; the gradients
/// are zero whenever the value is zero. For kSymmetry
/// the caller passes the same embedding twice and sums the two gradients.
/// Ties in the outer max of the sphere forms go to the lowest index.
PairClosedForm closed_form_pair(ClauseTemplate shape, ModelKind kind, Subspace subspace,
                                const Eigen::Ref<const Vector>& theta_body,
                                const Eigen::Ref<const Vector>& theta_head);

struct ClosedFormResult {
  double value = 0.0;
  RelationGradient wrt_relations;
};

/// Throws UnsupportedTemplateError unless has_closed_form(clause.shape).
ClosedFormResult closed_form_max_violation(const BoundClause& clause, const ModelParams& params,
                                           Subspace subspace);

struct GroundedLoss {
  double sum = 0.0;
  double max = 0.0;             // worst single grounding
  std::vector<EntityId> worst;  // entity bound to each variable at the max
  std::size_t terms = 0;
};

inline constexpr std::size_t kDefaultGroundingBudget = 1'000'000;

/// Sums the inconsistency loss over every assignment of entities to the
/// clause variables. Throws ConfigError when |E|^n exceeds `budget`.
GroundedLoss grounded_inconsistency_loss(const BoundClause& clause, const ModelParams& params,
                                         TNorm tnorm,
                                         std::size_t budget = kDefaultGroundingBudget);

/// The adversarial set made of the given entities' embeddings.
AdversarialSet set_from_entities(const ModelParams& params, const std::vector<EntityId>& entities);

}  // namespace asr

#endif  // ASR_ADVERSARY_HPP_
