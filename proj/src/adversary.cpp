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

#include "asr/adversary.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace asr {

std::string_view tnorm_name(TNorm t) { return t == TNorm::kProduct ? "product" : "godel"; }

std::optional<TNorm> parse_tnorm_name(std::string_view name) {
  if (name == "godel" || name == "min") return TNorm::kGodel;
  if (name == "product") return TNorm::kProduct;
  return std::nullopt;
}

namespace {

void check_atom(const BoundAtom& atom, const AdversarialSet& set, const ModelParams& params) {
  if (atom.arg1 >= set.size() || atom.arg2 >= set.size()) {
    throw UnknownSymbolError("atom refers to a variable not bound in the adversarial set");
  }
  if (static_cast<Eigen::Index>(atom.relation) >= params.relations.cols()) {
    throw UnknownSymbolError("unknown relation id " + std::to_string(atom.relation));
  }
}

std::vector<double> atom_scores(const std::vector<BoundAtom>& body, const AdversarialSet& set,
                                const ModelParams& params) {
  std::vector<double> s;
  s.reserve(body.size());
  for (const auto& a : body) s.push_back(atom_score(a, set, params));
  return s;
}

// Per-atom weights of d body / d atom_score.
std::vector<double> body_weights(const std::vector<double>& scores, TNorm tnorm) {
  std::vector<double> w(scores.size(), 0.0);
  if (tnorm == TNorm::kGodel) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
      if (scores[i] < scores[best]) best = i;
    w[best] = 1.0;
    return w;
  }
  for (std::size_t j = 0; j < scores.size(); ++j) {
    double p = 1.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (i != j) p *= scores[i];
    w[j] = p;
  }
  return w;
}

void add_atom_gradient(const BoundAtom& atom, const AdversarialSet& set, const ModelParams& params,
                       double weight, Matrix& d_set, Eigen::Ref<Vector> d_rel) {
  Eigen::Ref<Vector> d1 = d_set.col(static_cast<Eigen::Index>(atom.arg1));
  Eigen::Ref<Vector> d2 = d_set.col(static_cast<Eigen::Index>(atom.arg2));
  accumulate_score_gradient(params.kind, params.relation(atom.relation), set.binding(atom.arg1),
                            set.binding(atom.arg2), weight, d_rel, d1, d2);
}

// Calls fn(atom, weight) for every atom with its weight in d violation.
template <typename Fn>
void for_each_weighted_atom(const BoundClause& clause, const AdversarialSet& set,
                            const ModelParams& params, TNorm tnorm, Fn&& fn) {
  const auto scores = atom_scores(clause.body, set, params);
  const auto w = body_weights(scores, tnorm);
  for (std::size_t i = 0; i < clause.body.size(); ++i)
    if (w[i] != 0.0) fn(clause.body[i], w[i]);
  fn(clause.head, -1.0);
}

Vector& relation_slot(RelationGradient& g, RelationId r, Eigen::Index width) {
  auto it = g.find(r);
  if (it == g.end()) it = g.emplace(r, Vector::Zero(width)).first;
  return it->second;
}

}  // namespace

double atom_score(const BoundAtom& atom, const AdversarialSet& set, const ModelParams& params) {
  check_atom(atom, set, params);
  return score(params.kind, params.relation(atom.relation), set.binding(atom.arg1),
               set.binding(atom.arg2));
}

double body_score(const std::vector<BoundAtom>& body, const AdversarialSet& set,
                  const ModelParams& params, TNorm tnorm) {
  if (body.empty()) throw ConfigError("clause body must contain at least one atom");
  double acc = atom_score(body.front(), set, params);
  for (std::size_t i = 1; i < body.size(); ++i) {
    const double s = atom_score(body[i], set, params);
    acc = tnorm == TNorm::kGodel ? std::min(acc, s) : acc * s;
  }
  return acc;
}

double violation(const BoundClause& clause, const AdversarialSet& set, const ModelParams& params,
                 TNorm tnorm) {
  return body_score(clause.body, set, params, tnorm) - atom_score(clause.head, set, params);
}

double inconsistency_loss(const BoundClause& clause, const AdversarialSet& set,
                          const ModelParams& params, TNorm tnorm) {
  return std::max(0.0, violation(clause, set, params, tnorm));
}

ClauseGradient violation_grads(const BoundClause& clause, const AdversarialSet& set,
                               const ModelParams& params, TNorm tnorm) {
  ClauseGradient g;
  g.wrt_set = Matrix::Zero(set.embeddings.rows(), set.embeddings.cols());
  for (const auto& a : clause.body) relation_slot(g.wrt_relations, a.relation, params.width());
  relation_slot(g.wrt_relations, clause.head.relation, params.width());
  for_each_weighted_atom(clause, set, params, tnorm, [&](const BoundAtom& a, double w) {
    add_atom_gradient(a, set, params, w, g.wrt_set, g.wrt_relations.at(a.relation));
  });
  return g;
}

ClauseGradient inconsistency_grads(const BoundClause& clause, const AdversarialSet& set,
                                   const ModelParams& params, TNorm tnorm) {
  ClauseGradient g = violation_grads(clause, set, params, tnorm);
  if (violation(clause, set, params, tnorm) <= 0.0) {
    g.wrt_set.setZero();
    for (auto& [r, v] : g.wrt_relations) v.setZero();
  }
  return g;
}

double accumulate_inconsistency_relation_grads(const BoundClause& clause,
                                               const AdversarialSet& set,
                                               const ModelParams& params, TNorm tnorm,
                                               double weight, Matrix& d_relations) {
  const double v = violation(clause, set, params, tnorm);
  if (v <= 0.0) return 0.0;
  Matrix scratch = Matrix::Zero(set.embeddings.rows(), set.embeddings.cols());
  for_each_weighted_atom(clause, set, params, tnorm, [&](const BoundAtom& a, double w) {
    add_atom_gradient(a, set, params, weight * w, scratch,
                      d_relations.col(static_cast<Eigen::Index>(a.relation)));
  });
  return v;
}

void ascend_adversarial_set(const BoundClause& clause, const ModelParams& params,
                            Subspace subspace, AdversarialSet& set, std::size_t steps,
                            double learning_rate, TNorm tnorm) {
  Matrix grad(set.embeddings.rows(), set.embeddings.cols());
  Vector d_rel(params.width());
  for (std::size_t step = 0; step < steps; ++step) {
    project_columns(set.embeddings, subspace);
    grad.setZero();
    for_each_weighted_atom(clause, set, params, tnorm, [&](const BoundAtom& a, double w) {
      add_atom_gradient(a, set, params, w, grad, d_rel);
    });
    set.embeddings += learning_rate * grad;
  }
  project_columns(set.embeddings, subspace);
}

AdversarialSet find_adversarial_set(const BoundClause& clause, const ModelParams& params,
                                    Subspace subspace, const AdversaryOptions& options,
                                    std::mt19937_64& rng) {
  if (options.steps < 1) throw ConfigError("adversary needs at least one ascent step");
  if (options.restarts < 1) throw ConfigError("adversary needs at least one restart");
  if (params.entities.cols() == 0) throw ConfigError("adversary needs at least one entity");
  std::uniform_int_distribution<Eigen::Index> pick(0, params.entities.cols() - 1);

  AdversarialSet best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < options.restarts; ++r) {
    AdversarialSet s;
    s.embeddings.resize(params.width(), static_cast<Eigen::Index>(clause.num_variables));
    for (Eigen::Index j = 0; j < s.embeddings.cols(); ++j)
      s.embeddings.col(j) = params.entities.col(pick(rng));
    ascend_adversarial_set(clause, params, subspace, s, options.steps, options.learning_rate,
                           options.tnorm);
    const double v = violation(clause, s, params, options.tnorm);
    if (v > best_value) {
      best_value = v;
      best = std::move(s);
    }
  }
  return best;
}

DeltaVector delta_vector(ModelKind kind, const Eigen::Ref<const Vector>& theta_body,
                         const Eigen::Ref<const Vector>& theta_head) {
  if (theta_body.size() != theta_head.size())
    throw DimensionError("relation embeddings differ in width");
  DeltaVector d;
  d.delta = theta_body - theta_head;
  d.zeta = d.delta;
  if (kind == ModelKind::kComplEx) {
    const Eigen::Index k = theta_body.size() / 2;
    d.zeta.tail(k) = theta_body.tail(k) + theta_head.tail(k);
  }
  return d;
}

bool has_closed_form(ClauseTemplate shape) {
  return shape == ClauseTemplate::kSymmetry || shape == ClauseTemplate::kImplication ||
         shape == ClauseTemplate::kInverseImplication;
}

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Max over the subspace of Re(<d, h1, conj(h2)>) (or the real trilinear
// product) and its subgradient with respect to d.
double max_trilinear(ModelKind kind, Subspace subspace, const Vector& d, Vector& grad) {
  grad = Vector::Zero(d.size());
  if (kind == ModelKind::kDistMult) {
    if (subspace == Subspace::kUnitSphere) {
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < d.size(); ++j)
        if (std::abs(d[j]) > std::abs(d[best])) best = j;
      grad[best] = sign(d[best]);
      return std::abs(d[best]);
    }
    double v = 0.0;
    for (Eigen::Index j = 0; j < d.size(); ++j) {
      if (d[j] > 0.0) {
        v += d[j];
        grad[j] = 1.0;
      }
    }
    return v;
  }

  const Eigen::Index k = d.size() / 2;
  if (subspace == Subspace::kUnitSphere) {
    Eigen::Index best = 0;
    double best_mod = -1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double m = std::hypot(d[i], d[k + i]);
      if (m > best_mod) {
        best_mod = m;
        best = i;
      }
    }
    if (best_mod > 0.0) {
      grad[best] = d[best] / best_mod;
      grad[k + best] = d[k + best] / best_mod;
    }
    return best_mod;
  }
  double v = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double re = d[i], im = d[k + i];
    v += std::max(0.0, re) + std::max(re, std::abs(im));
    grad[i] = (re > 0.0 ? 1.0 : 0.0) + (re >= std::abs(im) ? 1.0 : 0.0);
    grad[k + i] = std::abs(im) > re ? sign(im) : 0.0;
  }
  return v;
}

}  // namespace

PairClosedForm closed_form_pair(ClauseTemplate shape, ModelKind kind, Subspace subspace,
                                const Eigen::Ref<const Vector>& theta_body,
                                const Eigen::Ref<const Vector>& theta_head) {
  if (!has_closed_form(shape)) {
    throw UnsupportedTemplateError("no closed form for template '" +
                                   std::string(template_name(shape)) + "'");
  }
  if (kind == ModelKind::kComplEx && theta_body.size() % 2 != 0)
    throw DimensionError("complex embedding must have even width");
  const DeltaVector dv = delta_vector(kind, theta_body, theta_head);
  PairClosedForm out;
  Vector g;
  const bool swapped = shape != ClauseTemplate::kImplication;
  out.value = max_trilinear(kind, subspace, swapped ? dv.zeta : dv.delta, g);
  // Zero subgradient at the hinge kink, as for the iterative loss.
  if (!(out.value > 0.0)) {
    out.value = 0.0;
    g.setZero();
  }
  out.d_body = g;
  out.d_head = -g;
  if (swapped && kind == ModelKind::kComplEx) {
    const Eigen::Index k = g.size() / 2;
    out.d_head.tail(k) = g.tail(k);
  }
  return out;
}

ClosedFormResult closed_form_max_violation(const BoundClause& clause, const ModelParams& params,
                                           Subspace subspace) {
  if (!has_closed_form(clause.shape) || clause.body.size() != 1) {
    throw UnsupportedTemplateError("no closed form for template '" +
                                   std::string(template_name(clause.shape)) + "'");
  }
  const RelationId b = clause.body.front().relation;
  const RelationId r = clause.head.relation;
  for (RelationId id : {b, r}) {
    if (static_cast<Eigen::Index>(id) >= params.relations.cols())
      throw UnknownSymbolError("unknown relation id " + std::to_string(id));
  }
  ClosedFormResult res;
  const Eigen::Index width = params.width();
  if (clause.shape == ClauseTemplate::kSymmetry && params.kind == ModelKind::kDistMult) {
    res.wrt_relations.emplace(r, Vector::Zero(width));
    return res;
  }
  const PairClosedForm pair =
      closed_form_pair(clause.shape, params.kind, subspace, params.relation(b), params.relation(r));
  res.value = pair.value;
  relation_slot(res.wrt_relations, b, width) += pair.d_body;
  relation_slot(res.wrt_relations, r, width) += pair.d_head;
  return res;
}

AdversarialSet set_from_entities(const ModelParams& params, const std::vector<EntityId>& entities) {
  AdversarialSet s;
  s.embeddings.resize(params.width(), static_cast<Eigen::Index>(entities.size()));
  for (std::size_t j = 0; j < entities.size(); ++j) {
    if (static_cast<Eigen::Index>(entities[j]) >= params.entities.cols())
      throw UnknownSymbolError("unknown entity id " + std::to_string(entities[j]));
    s.embeddings.col(static_cast<Eigen::Index>(j)) = params.entity(entities[j]);
  }
  return s;
}

GroundedLoss grounded_inconsistency_loss(const BoundClause& clause, const ModelParams& params,
                                         TNorm tnorm, std::size_t budget) {
  const auto n_ent = static_cast<std::size_t>(params.entities.cols());
  const std::size_t n_var = clause.num_variables;
  std::size_t count = 1;
  bool overflow = false;
  for (std::size_t i = 0; i < n_var; ++i) {
    if (n_ent != 0 && count > std::numeric_limits<std::size_t>::max() / n_ent) {
      overflow = true;
      break;
    }
    count *= n_ent;
  }
  if (overflow || count > budget) {
    throw ConfigError("grounding needs " +
                      (overflow ? std::string("more than 2^64") : std::to_string(count)) +
                      " terms (" + std::to_string(n_ent) + "^" + std::to_string(n_var) +
                      "), over the budget of " + std::to_string(budget));
  }
  GroundedLoss out;
  if (n_ent == 0) return out;

  std::vector<EntityId> tuple(n_var, 0);
  AdversarialSet s = set_from_entities(params, tuple);
  bool first = true;
  while (true) {
    const double l = inconsistency_loss(clause, s, params, tnorm);
    out.sum += l;
    ++out.terms;
    if (first || l > out.max) {
      out.max = l;
      out.worst = tuple;
      first = false;
    }
    // Odometer increment, last variable fastest.
    std::size_t pos = n_var;
    while (pos > 0) {
      --pos;
      if (++tuple[pos] < n_ent) {
        s.embeddings.col(static_cast<Eigen::Index>(pos)) = params.entity(tuple[pos]);
        break;
      }
      tuple[pos] = 0;
      s.embeddings.col(static_cast<Eigen::Index>(pos)) = params.entity(0);
      if (pos == 0) return out;
    }
    if (n_var == 0) return out;
  }
}

}  // namespace asr
