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

#include "asr/scoring.hpp"

#include <cmath>

namespace asr {

std::string_view model_name(ModelKind kind) {
  return kind == ModelKind::kComplEx ? "complex" : "distmult";
}

std::string_view subspace_name(Subspace s) {
  return s == Subspace::kUnitCube ? "cube" : "sphere";
}

std::optional<ModelKind> parse_model_name(std::string_view name) {
  if (name == "distmult") return ModelKind::kDistMult;
  if (name == "complex") return ModelKind::kComplEx;
  return std::nullopt;
}

std::optional<Subspace> parse_subspace_name(std::string_view name) {
  if (name == "cube") return Subspace::kUnitCube;
  if (name == "sphere") return Subspace::kUnitSphere;
  return std::nullopt;
}

void project_columns(Matrix& m, Subspace subspace) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) project_in_place(m.col(j), subspace);
}

bool in_subspace(const Eigen::Ref<const Vector>& v, Subspace subspace, double tol) {
  if (subspace == Subspace::kUnitCube) {
    return v.size() == 0 || (v.minCoeff() >= 0.0 && v.maxCoeff() <= 1.0);
  }
  return std::abs(v.norm() - 1.0) < tol;
}

ModelParams init_params(std::size_t num_entities, std::size_t num_relations, ModelKind kind,
                        Eigen::Index k, Subspace subspace, std::mt19937_64& rng) {
  if (k < 1) throw ConfigError("embedding dimension must be >= 1");
  ModelParams p;
  p.kind = kind;
  p.dim = k;
  const double bound = std::sqrt(6.0 / static_cast<double>(k + k));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  const Eigen::Index width = p.width();
  p.entities.resize(width, static_cast<Eigen::Index>(num_entities));
  p.relations.resize(width, static_cast<Eigen::Index>(num_relations));
  // Explicit loops fix the sampling order independent of Eigen internals.
  for (Eigen::Index j = 0; j < p.entities.cols(); ++j)
    for (Eigen::Index i = 0; i < width; ++i) p.entities(i, j) = uniform(rng);
  for (Eigen::Index j = 0; j < p.relations.cols(); ++j)
    for (Eigen::Index i = 0; i < width; ++i) p.relations(i, j) = uniform(rng);
  project_columns(p.entities, subspace);
  return p;
}

ModelParams init_params(const Vocabulary& vocab, ModelKind kind, Eigen::Index k, Subspace subspace,
                        std::mt19937_64& rng) {
  return init_params(vocab.num_entities(), vocab.num_relations(), kind, k, subspace, rng);
}

}  // namespace asr
