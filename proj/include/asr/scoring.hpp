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

// DistMult and ComplEx scoring layers over Eigen vectors.
//
// Real embeddings are plain k-vectors. Complex embeddings are stored as
// 2k-vectors with the real parts stacked over the imaginary parts, so that
// (re, im) = (v.head(k), v.tail(k)). All functions accept any Eigen
// expression (columns, blocks, maps) and are templated on the scalar type.

#ifndef ASR_SCORING_HPP_
#define ASR_SCORING_HPP_

#include <random>
#include <string_view>
#include <optional>

#include <Eigen/Dense>

#include "asr/error.hpp"
#include "asr/graph.hpp"

namespace asr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ModelKind { kDistMult, kComplEx };
enum class Subspace { kUnitSphere, kUnitCube };

std::string_view model_name(ModelKind kind);
std::string_view subspace_name(Subspace s);
std::optional<ModelKind> parse_model_name(std::string_view name);
std::optional<Subspace> parse_subspace_name(std::string_view name);

/// Number of reals stored per embedding: k for DistMult, 2k for ComplEx.
inline Eigen::Index embedding_width(ModelKind kind, Eigen::Index k) {
  return kind == ModelKind::kComplEx ? 2 * k : k;
}

namespace detail {

template <typename A, typename B, typename C>
void check_same_size(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                     const Eigen::MatrixBase<C>& c) {
  if (a.size() != b.size() || a.size() != c.size()) {
    throw DimensionError("score: embedding dimensions differ");
  }
}

template <typename A>
Eigen::Index complex_half(const Eigen::MatrixBase<A>& a) {
  if (a.size() % 2 != 0) throw DimensionError("complex embedding must have even width");
  return a.size() / 2;
}

}  // namespace detail

/// Tri-linear dot product sum_i theta_i * h1_i * h2_i. The entity product is
/// formed first so that swapping h1 and h2 gives a bitwise identical result.
template <typename DT, typename D1, typename D2>
typename DT::Scalar score_distmult(const Eigen::MatrixBase<DT>& theta,
                                   const Eigen::MatrixBase<D1>& h1,
                                   const Eigen::MatrixBase<D2>& h2) {
  detail::check_same_size(theta, h1, h2);
  return (theta.array() * (h1.array() * h2.array())).sum();
}

/// Re(<theta, h1, conj(h2)>) for stacked complex embeddings.
template <typename DT, typename D1, typename D2>
typename DT::Scalar score_complex(const Eigen::MatrixBase<DT>& theta,
                                  const Eigen::MatrixBase<D1>& h1,
                                  const Eigen::MatrixBase<D2>& h2) {
  detail::check_same_size(theta, h1, h2);
  const Eigen::Index k = detail::complex_half(theta);
  const auto tr = theta.head(k).array(), ti = theta.tail(k).array();
  const auto ar = h1.head(k).array(), ai = h1.tail(k).array();
  const auto cr = h2.head(k).array(), ci = h2.tail(k).array();
  return (tr * (ar * cr + ai * ci) + ti * (ar * ci - ai * cr)).sum();
}

template <typename DT, typename D1, typename D2>
typename DT::Scalar score(ModelKind kind, const Eigen::MatrixBase<DT>& theta,
                          const Eigen::MatrixBase<D1>& h1, const Eigen::MatrixBase<D2>& h2) {
  return kind == ModelKind::kComplEx ? score_complex(theta, h1, h2)
                                     : score_distmult(theta, h1, h2);
}

/// Adds weight * d score / d{theta, h1, h2} into the given outputs. Any of the
/// outputs may alias the same storage when the same vector is used twice.
template <typename DT, typename D1, typename D2, typename OT, typename O1, typename O2>
void accumulate_score_gradient(ModelKind kind, const Eigen::MatrixBase<DT>& theta,
                               const Eigen::MatrixBase<D1>& h1, const Eigen::MatrixBase<D2>& h2,
                               typename DT::Scalar weight, Eigen::MatrixBase<OT>& d_theta,
                               Eigen::MatrixBase<O1>& d_h1, Eigen::MatrixBase<O2>& d_h2) {
  detail::check_same_size(theta, h1, h2);
  if (kind == ModelKind::kDistMult) {
    d_theta.array() += weight * (h1.array() * h2.array());
    d_h1.array() += weight * (theta.array() * h2.array());
    d_h2.array() += weight * (theta.array() * h1.array());
    return;
  }
  const Eigen::Index k = detail::complex_half(theta);
  const auto tr = theta.head(k).array(), ti = theta.tail(k).array();
  const auto ar = h1.head(k).array(), ai = h1.tail(k).array();
  const auto cr = h2.head(k).array(), ci = h2.tail(k).array();
  d_theta.head(k).array() += weight * (ar * cr + ai * ci);
  d_theta.tail(k).array() += weight * (ar * ci - ai * cr);
  d_h1.head(k).array() += weight * (tr * cr + ti * ci);
  d_h1.tail(k).array() += weight * (tr * ci - ti * cr);
  d_h2.head(k).array() += weight * (tr * ar - ti * ai);
  d_h2.tail(k).array() += weight * (tr * ai + ti * ar);
}

// Rvalue overloads so that block expressions (e.g. matrix.col(i)) can be
// passed directly as outputs.
template <typename DT, typename D1, typename D2, typename OT, typename O1, typename O2>
void accumulate_score_gradient(ModelKind kind, const Eigen::MatrixBase<DT>& theta,
                               const Eigen::MatrixBase<D1>& h1, const Eigen::MatrixBase<D2>& h2,
                               typename DT::Scalar weight, Eigen::MatrixBase<OT>&& d_theta,
                               Eigen::MatrixBase<O1>&& d_h1, Eigen::MatrixBase<O2>&& d_h2) {
  accumulate_score_gradient(kind, theta, h1, h2, weight, d_theta, d_h1, d_h2);
}

struct ScoreGradient {
  Vector d_theta;
  Vector d_h1;
  Vector d_h2;
};

template <typename DT, typename D1, typename D2>
ScoreGradient grad_score(ModelKind kind, const Eigen::MatrixBase<DT>& theta,
                         const Eigen::MatrixBase<D1>& h1, const Eigen::MatrixBase<D2>& h2) {
  ScoreGradient g{Vector::Zero(theta.size()), Vector::Zero(h1.size()), Vector::Zero(h2.size())};
  accumulate_score_gradient(kind, theta, h1, h2, 1.0, g.d_theta, g.d_h1, g.d_h2);
  return g;
}

/// The score is linear in the object embedding: score = object_weights . h2.
template <typename DT, typename D1>
Vector object_weights(ModelKind kind, const Eigen::MatrixBase<DT>& theta,
                      const Eigen::MatrixBase<D1>& h1) {
  if (kind == ModelKind::kDistMult) return theta.cwiseProduct(h1);
  const Eigen::Index k = detail::complex_half(theta);
  Vector w(2 * k);
  const auto tr = theta.head(k).array(), ti = theta.tail(k).array();
  const auto ar = h1.head(k).array(), ai = h1.tail(k).array();
  w.head(k).array() = tr * ar - ti * ai;
  w.tail(k).array() = tr * ai + ti * ar;
  return w;
}

/// The score is linear in the subject embedding: score = subject_weights . h1.
template <typename DT, typename D2>
Vector subject_weights(ModelKind kind, const Eigen::MatrixBase<DT>& theta,
                       const Eigen::MatrixBase<D2>& h2) {
  if (kind == ModelKind::kDistMult) return theta.cwiseProduct(h2);
  const Eigen::Index k = detail::complex_half(theta);
  Vector w(2 * k);
  const auto tr = theta.head(k).array(), ti = theta.tail(k).array();
  const auto cr = h2.head(k).array(), ci = h2.tail(k).array();
  w.head(k).array() = tr * cr + ti * ci;
  w.tail(k).array() = tr * ci - ti * cr;
  return w;
}

/// Projects onto the unit cube (componentwise clamp to [0, 1], real and
/// imaginary parts independently) or the unit sphere (division by the L2 norm
/// of the whole stacked vector). Throws DimensionError for a zero vector on
/// the sphere.
template <typename Derived>
void project_in_place(Eigen::MatrixBase<Derived>& v, Subspace subspace) {
  if (subspace == Subspace::kUnitCube) {
    v = v.cwiseMax(0.0).cwiseMin(1.0);
    return;
  }
  const auto norm = v.norm();
  if (!(norm > 0.0)) throw DimensionError("cannot project a zero vector onto the unit sphere");
  v /= norm;
}

template <typename Derived>
void project_in_place(Eigen::MatrixBase<Derived>&& v, Subspace subspace) {
  project_in_place(v, subspace);
}

inline Vector project(Vector v, Subspace subspace) {
  project_in_place(v, subspace);
  return v;
}

/// Projects every column.
void project_columns(Matrix& m, Subspace subspace);

bool in_subspace(const Eigen::Ref<const Vector>& v, Subspace subspace, double tol = 1e-12);

/// Entity embeddings (the encoder) and relation embeddings, one column each.
struct ModelParams {
  ModelKind kind = ModelKind::kDistMult;
  Eigen::Index dim = 0;  // k
  Matrix entities;       // width x |E|
  Matrix relations;      // width x |R|

  Eigen::Index width() const { return embedding_width(kind, dim); }
  auto entity(EntityId e) const { return entities.col(static_cast<Eigen::Index>(e)); }
  auto relation(RelationId r) const { return relations.col(static_cast<Eigen::Index>(r)); }

  double score(const Triple& t) const {
    return asr::score(kind, relation(t.relation), entity(t.subject), entity(t.object));
  }
};

/// Uniform Xavier initialisation with fan_in = fan_out = k, bound sqrt(3/k).
/// Entity embeddings are then projected onto `subspace`; relation embeddings
/// are left unconstrained.
ModelParams init_params(const Vocabulary& vocab, ModelKind kind, Eigen::Index k, Subspace subspace,
                        std::mt19937_64& rng);
ModelParams init_params(std::size_t num_entities, std::size_t num_relations, ModelKind kind,
                        Eigen::Index k, Subspace subspace, std::mt19937_64& rng);

}  // namespace asr

#endif  // ASR_SCORING_HPP_
