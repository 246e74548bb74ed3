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

// Self-contained numerical checks: finite differences, exhaustive vertex
// enumeration, iterative adversary against the analytic maximum, and the
// grounded loss against both.

#ifndef ASR_VERIFY_HPP_
#define ASR_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "asr/adversary.hpp"
#include "asr/clause.hpp"
#include "asr/scoring.hpp"

namespace asr {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst error or gap seen
  double tolerance = 0.0;
  std::size_t trials = 0;
  std::string detail;
};

/// Central differences of f at x with step eps.
Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                        double eps = 1e-5);

/// True when one-sided differences disagree along some coordinate, i.e. x
/// is too close to a kink of f for a finite-difference comparison.
bool near_kink(const std::function<double(const Vector&)>& f, const Vector& x, double eps = 1e-5);

/// ||a - b||_inf / max(||a||_inf, ||b||_inf, 1e-12).
double relative_error(const Vector& a, const Vector& b);

/// Analytic gradients of the scorers, the fact loss, the inconsistency loss
/// (both t-norms) and the closed forms against central differences.
/// `trials` instances per family.
std::vector<CheckResult> check_gradients(std::size_t trials, Eigen::Index k, std::uint64_t seed,
                                         double tolerance = 1e-6);

/// Closed form against the max over all vertices h1, h2 of the unit cube.
/// The dimension cycles through 1..max_k.
CheckResult check_closed_form_vertices(ModelKind kind, std::size_t trials, Eigen::Index max_k,
                                       std::uint64_t seed, double tolerance = 1e-12);

/// DistMult on the unit sphere at k = 2: closed form against a dense grid
/// over h1 = (cos a, sin a), h2 = (cos c, sin c).
CheckResult check_closed_form_sphere_grid(std::size_t trials, std::size_t grid,
                                          std::uint64_t seed, double tolerance = 1e-3);

struct AdversaryCheckOptions {
  std::size_t draws = 20;
  Eigen::Index k = 3;
  std::size_t steps = 1000;
  std::size_t restarts = 10;
  double learning_rate = 0.1;
  double gap_tolerance = 1e-2;
  double excess_tolerance = 1e-9;
  std::uint64_t seed = 0;
};

/// One result per (template, model, subspace) cell. Only cells whose
/// template is listed in `templates` are run.
std::vector<CheckResult> check_adversary(const AdversaryCheckOptions& opts,
                                         const std::vector<ClauseTemplate>& templates);

/// Closed form and iterative adversary both give exactly zero for symmetry
/// under DistMult.
CheckResult check_distmult_symmetry(std::size_t draws, std::uint64_t seed);

/// On synthetic instances: the worst grounded tuple never beats the closed
/// form, and gradient ascent seeded with it never lowers its loss.
CheckResult check_grounded(std::size_t instances, std::uint64_t seed);

}  // namespace asr

#endif  // ASR_VERIFY_HPP_
