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

#include "asr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <random>

#include "asr/synthetic.hpp"
#include "asr/training.hpp"

namespace asr {

Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                        double eps) {
  Vector g(x.size());
  Vector y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = x[i] + eps;
    const double up = f(y);
    y[i] = x[i] - eps;
    const double down = f(y);
    y[i] = x[i];
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

bool near_kink(const std::function<double(const Vector&)>& f, const Vector& x, double eps) {
  const double f0 = f(x);
  Vector y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = x[i] + eps;
    const double fwd = (f(y) - f0) / eps;
    y[i] = x[i] - eps;
    const double bwd = (f0 - f(y)) / eps;
    y[i] = x[i];
    if (std::abs(fwd - bwd) > 1e-3 * std::max(1.0, std::abs(fwd + bwd) / 2.0)) return true;
  }
  return false;
}

double relative_error(const Vector& a, const Vector& b) {
  const double num = (a - b).lpNorm<Eigen::Infinity>();
  const double den = std::max({a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>(), 1e-12});
  return num / den;
}

namespace {

using Rng = std::mt19937_64;

Vector uniform_vector(Eigen::Index n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Matrix uniform_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -1.0,
                      double hi = 1.0) {
  Matrix m(r, c);
  std::uniform_real_distribution<double> u(lo, hi);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
  return m;
}

Vector flatten(const Matrix& a, const Matrix& b) {
  Vector v(a.size() + b.size());
  v << Eigen::Map<const Vector>(a.data(), a.size()), Eigen::Map<const Vector>(b.data(), b.size());
  return v;
}

void unflatten(const Vector& v, Matrix& a, Matrix& b) {
  a = Eigen::Map<const Matrix>(v.data(), a.rows(), a.cols());
  b = Eigen::Map<const Matrix>(v.data() + a.size(), b.rows(), b.cols());
}

Vocabulary small_vocab(std::size_t n_ent, std::size_t n_rel) {
  Vocabulary v;
  for (std::size_t i = 0; i < n_rel; ++i) v.relation_id("r" + std::to_string(i));
  for (std::size_t i = 0; i < n_ent; ++i) v.entity_id("e" + std::to_string(i));
  v.freeze();
  return v;
}

std::string clause_for(ClauseTemplate t) {
  switch (t) {
    case ClauseTemplate::kSymmetry:
      return "r0(X,Y) => r0(Y,X)";
    case ClauseTemplate::kImplication:
      return "r0(X,Y) => r1(X,Y)";
    case ClauseTemplate::kInverseImplication:
      return "r0(X,Y) => r1(Y,X)";
    case ClauseTemplate::kTransitivitySame:
      return "r0(X,Y) & r0(Y,Z) => r0(X,Z)";
    default:
      return "r0(X,Y) & r1(Y,Z) => r2(X,Z)";
  }
}

struct ErrorTally {
  double worst = 0.0;
  std::size_t count = 0;
  std::size_t skipped = 0;
  void add(double e) {
    worst = std::max(worst, e);
    ++count;
  }
};

constexpr int kMaxResample = 200;

// Draws instances from `make` until one is usable and away from kinks, then
// records the gradient error.
template <typename Make>
void run_fd(ErrorTally& tally, Rng& rng, Make&& make) {
  for (int attempt = 0; attempt < kMaxResample; ++attempt) {
    auto inst = make(rng);
    if (!inst.usable || near_kink(inst.f, inst.x)) {
      ++tally.skipped;
      continue;
    }
    tally.add(relative_error(inst.analytic, numeric_gradient(inst.f, inst.x)));
    return;
  }
}

struct FdInstance {
  std::function<double(const Vector&)> f;
  Vector x;
  Vector analytic;
  bool usable = true;
};

CheckResult summarize(const std::string& name, const ErrorTally& t, std::size_t wanted,
                      double tol) {
  CheckResult r;
  r.name = name;
  r.trials = t.count;
  r.measured = t.worst;
  r.tolerance = tol;
  r.passed = t.count >= wanted && t.worst < tol;
  char buf[160];
  std::snprintf(buf, sizeof buf, "max rel-err %.3e over %zu instances (%zu kink draws skipped)",
                t.worst, t.count, t.skipped);
  r.detail = buf;
  return r;
}

}  // namespace

std::vector<CheckResult> check_gradients(std::size_t trials, Eigen::Index k, std::uint64_t seed,
                                         double tolerance) {
  Rng rng(seed);
  std::vector<CheckResult> out;
  const ModelKind kinds[] = {ModelKind::kDistMult, ModelKind::kComplEx};

  {
    ErrorTally t;
    for (ModelKind kind : kinds) {
      const Eigen::Index w = embedding_width(kind, k);
      for (std::size_t i = 0; i < trials; ++i) {
        run_fd(t, rng, [&](Rng& g) {
          FdInstance in;
          in.x = uniform_vector(3 * w, g);
          in.f = [kind, w](const Vector& x) {
            return score(kind, x.segment(0, w), x.segment(w, w), x.segment(2 * w, w));
          };
          const ScoreGradient sg = grad_score(kind, in.x.segment(0, w), in.x.segment(w, w),
                                              in.x.segment(2 * w, w));
          in.analytic.resize(3 * w);
          in.analytic << sg.d_theta, sg.d_h1, sg.d_h2;
          return in;
        });
      }
    }
    out.push_back(summarize("gradients/score", t, 2 * trials, tolerance));
  }

  {
    ErrorTally t;
    for (ModelKind kind : kinds) {
      for (std::size_t i = 0; i < trials; ++i) {
        run_fd(t, rng, [&](Rng& g) {
          ModelParams p;
          p.kind = kind;
          p.dim = k;
          p.entities = uniform_matrix(p.width(), 6, g);
          p.relations = uniform_matrix(p.width(), 2, g);
          std::uniform_int_distribution<EntityId> ent(0, 5);
          std::uniform_int_distribution<RelationId> rel(0, 1);
          std::bernoulli_distribution coin(0.5);
          std::vector<TrainingBatchItem> batch;
          for (int b = 0; b < 6; ++b)
            batch.push_back({Triple{rel(g), ent(g), ent(g)}, coin(g) ? 1 : -1});
          const double margin = 1.0;
          FdInstance in;
          in.x = flatten(p.entities, p.relations);
          in.f = [p, batch, margin](const Vector& x) mutable {
            unflatten(x, p.entities, p.relations);
            return fact_loss_and_grads(batch, p, margin).loss;
          };
          const FactLossResult r = fact_loss_and_grads(batch, p, margin);
          in.analytic = flatten(r.d_entities, r.d_relations);
          in.usable = r.loss > 0.0;
          return in;
        });
      }
    }
    out.push_back(summarize("gradients/fact-loss", t, 2 * trials, tolerance));
  }

  {
    ErrorTally t;
    const Vocabulary vocab = small_vocab(4, 3);
    std::size_t wanted = 0;
    for (ModelKind kind : kinds) {
      for (TNorm tn : {TNorm::kGodel, TNorm::kProduct}) {
        for (ClauseTemplate shape :
             {ClauseTemplate::kImplication, ClauseTemplate::kInverseImplication,
              ClauseTemplate::kTransitivityGeneral}) {
          const BoundClause bc = bind_clause(parse_clause(clause_for(shape)), vocab);
          for (std::size_t i = 0; i < trials; ++i, ++wanted) {
            run_fd(t, rng, [&](Rng& g) {
              ModelParams p;
              p.kind = kind;
              p.dim = k;
              p.entities = Matrix::Zero(p.width(), 1);
              p.relations = uniform_matrix(p.width(), 3, g);
              AdversarialSet s{uniform_matrix(p.width(),
                                              static_cast<Eigen::Index>(bc.num_variables), g)};
              FdInstance in;
              in.x = flatten(s.embeddings, p.relations);
              in.f = [p, s, bc, tn](const Vector& x) mutable {
                unflatten(x, s.embeddings, p.relations);
                return inconsistency_loss(bc, s, p, tn);
              };
              const ClauseGradient cg = inconsistency_grads(bc, s, p, tn);
              Matrix d_rel = Matrix::Zero(p.relations.rows(), p.relations.cols());
              for (const auto& [r, v] : cg.wrt_relations)
                d_rel.col(static_cast<Eigen::Index>(r)) = v;
              in.analytic = flatten(cg.wrt_set, d_rel);
              in.usable = inconsistency_loss(bc, s, p, tn) > 0.0;
              return in;
            });
          }
        }
      }
    }
    out.push_back(summarize("gradients/inconsistency-loss", t, wanted, tolerance));
  }

  {
    ErrorTally t;
    const Vocabulary vocab = small_vocab(1, 2);
    std::size_t wanted = 0;
    for (ModelKind kind : kinds) {
      for (Subspace sub : {Subspace::kUnitCube, Subspace::kUnitSphere}) {
        for (ClauseTemplate shape : {ClauseTemplate::kSymmetry, ClauseTemplate::kImplication,
                                     ClauseTemplate::kInverseImplication}) {
          // DistMult symmetry is identically zero; there is nothing to compare.
          if (kind == ModelKind::kDistMult && shape == ClauseTemplate::kSymmetry) continue;
          const BoundClause bc = bind_clause(parse_clause(clause_for(shape)), vocab);
          for (std::size_t i = 0; i < trials; ++i, ++wanted) {
            run_fd(t, rng, [&](Rng& g) {
              ModelParams p;
              p.kind = kind;
              p.dim = k;
              p.entities = Matrix::Zero(p.width(), 1);
              p.relations = uniform_matrix(p.width(), 2, g);
              Matrix unused(0, 0);
              FdInstance in;
              in.x = flatten(p.relations, unused);
              in.f = [p, bc, sub](const Vector& x) mutable {
                p.relations = Eigen::Map<const Matrix>(x.data(), p.relations.rows(),
                                                       p.relations.cols());
                return closed_form_max_violation(bc, p, sub).value;
              };
              const ClosedFormResult cf = closed_form_max_violation(bc, p, sub);
              Matrix d_rel = Matrix::Zero(p.relations.rows(), p.relations.cols());
              for (const auto& [r, v] : cf.wrt_relations)
                d_rel.col(static_cast<Eigen::Index>(r)) = v;
              in.analytic = flatten(d_rel, unused);
              in.usable = cf.value > 0.0;
              return in;
            });
          }
        }
      }
    }
    out.push_back(summarize("gradients/closed-form", t, wanted, tolerance));
  }
  return out;
}

namespace {

// Re(sum_i theta_i a_i conj(c_i)) with complex numbers, or the real
// trilinear product. Written independently of the scoring layer.
double direct_score(ModelKind kind, const Vector& theta, const Vector& a, const Vector& c) {
  if (kind == ModelKind::kDistMult) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) s += theta[i] * a[i] * c[i];
    return s;
  }
  const Eigen::Index k = theta.size() / 2;
  std::complex<double> s = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const std::complex<double> t(theta[i], theta[k + i]), x(a[i], a[k + i]), y(c[i], c[k + i]);
    s += t * x * std::conj(y);
  }
  return s.real();
}

double vertex_max(ClauseTemplate shape, ModelKind kind, const Vector& tb, const Vector& tr) {
  const Eigen::Index w = tb.size();
  const std::uint64_t n = std::uint64_t{1} << w;
  Vector a(w), c(w);
  double best = 0.0;  // the hinge floor
  for (std::uint64_t ma = 0; ma < n; ++ma) {
    for (Eigen::Index i = 0; i < w; ++i) a[i] = (ma >> i) & 1u ? 1.0 : 0.0;
    for (std::uint64_t mc = 0; mc < n; ++mc) {
      for (Eigen::Index i = 0; i < w; ++i) c[i] = (mc >> i) & 1u ? 1.0 : 0.0;
      const double head = shape == ClauseTemplate::kImplication ? direct_score(kind, tr, a, c)
                                                                : direct_score(kind, tr, c, a);
      best = std::max(best, direct_score(kind, tb, a, c) - head);
    }
  }
  return best;
}

}  // namespace

CheckResult check_closed_form_vertices(ModelKind kind, std::size_t trials, Eigen::Index max_k,
                                       std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  const Vocabulary vocab = small_vocab(1, 2);
  const ClauseTemplate shapes[] = {ClauseTemplate::kImplication,
                                   ClauseTemplate::kInverseImplication, ClauseTemplate::kSymmetry};
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(t) % max_k;
    ModelParams p;
    p.kind = kind;
    p.dim = k;
    p.entities = Matrix::Zero(p.width(), 1);
    p.relations = uniform_matrix(p.width(), 2, rng);
    for (ClauseTemplate shape : shapes) {
      const BoundClause bc = bind_clause(parse_clause(clause_for(shape)), vocab);
      const double cf = closed_form_max_violation(bc, p, Subspace::kUnitCube).value;
      const Vector tb = p.relation(bc.body.front().relation);
      const Vector tr = p.relation(bc.head.relation);
      worst = std::max(worst, std::abs(cf - vertex_max(shape, kind, tb, tr)));
    }
  }
  CheckResult r;
  r.name = "closed-form/" + std::string(model_name(kind)) + "/cube-vertices";
  r.trials = trials;
  r.measured = worst;
  r.tolerance = tolerance;
  r.passed = worst <= tolerance;
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |closed form - vertex max| %.3e, k <= %ld", worst,
                static_cast<long>(max_k));
  r.detail = buf;
  return r;
}

CheckResult check_closed_form_sphere_grid(std::size_t trials, std::size_t grid,
                                          std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  const Vocabulary vocab = small_vocab(1, 2);
  const double two_pi = 2.0 * std::acos(-1.0);
  std::vector<double> cs(grid), sn(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    cs[i] = std::cos(two_pi * static_cast<double>(i) / static_cast<double>(grid));
    sn[i] = std::sin(two_pi * static_cast<double>(i) / static_cast<double>(grid));
  }
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    ModelParams p;
    p.kind = ModelKind::kDistMult;
    p.dim = 2;
    p.entities = Matrix::Zero(2, 1);
    p.relations = uniform_matrix(2, 2, rng);
    for (ClauseTemplate shape : {ClauseTemplate::kImplication,
                                 ClauseTemplate::kInverseImplication}) {
      const BoundClause bc = bind_clause(parse_clause(clause_for(shape)), vocab);
      const double cf = closed_form_max_violation(bc, p, Subspace::kUnitSphere).value;
      const Vector tb = p.relation(0), tr = p.relation(1);
      // h1 = (cos phi, sin phi), h2 = (cos psi, sin psi).
      double best = 0.0;
      for (std::size_t a = 0; a < grid; ++a) {
        for (std::size_t c = 0; c < grid; ++c) {
          const double x0 = cs[a] * cs[c], x1 = sn[a] * sn[c];
          best = std::max(best, (tb[0] - tr[0]) * x0 + (tb[1] - tr[1]) * x1);
        }
      }
      worst = std::max(worst, std::abs(cf - best));
    }
  }
  CheckResult r;
  r.name = "closed-form/distmult/sphere-grid";
  r.trials = trials;
  r.measured = worst;
  r.tolerance = tolerance;
  r.passed = worst <= tolerance;
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |closed form - grid max| %.3e on a %zux%zu angle grid",
                worst, grid, grid);
  r.detail = buf;
  return r;
}

namespace {

ModelParams random_params(ModelKind kind, Eigen::Index k, Subspace sub, std::size_t n_ent,
                          std::size_t n_rel, Rng& rng) {
  ModelParams p;
  p.kind = kind;
  p.dim = k;
  p.relations = uniform_matrix(p.width(), static_cast<Eigen::Index>(n_rel), rng);
  if (sub == Subspace::kUnitCube) {
    p.entities = uniform_matrix(p.width(), static_cast<Eigen::Index>(n_ent), rng, 0.0, 1.0);
  } else {
    std::normal_distribution<double> nd;
    p.entities.resize(p.width(), static_cast<Eigen::Index>(n_ent));
    for (Eigen::Index j = 0; j < p.entities.cols(); ++j)
      for (Eigen::Index i = 0; i < p.entities.rows(); ++i) p.entities(i, j) = nd(rng);
    project_columns(p.entities, sub);
  }
  return p;
}

}  // namespace

std::vector<CheckResult> check_adversary(const AdversaryCheckOptions& opts,
                                         const std::vector<ClauseTemplate>& templates) {
  Rng rng(opts.seed);
  const Vocabulary vocab = small_vocab(30, 2);
  std::vector<CheckResult> out;
  for (ClauseTemplate shape : templates) {
    const BoundClause bc = bind_clause(parse_clause(clause_for(shape)), vocab);
    for (ModelKind kind : {ModelKind::kDistMult, ModelKind::kComplEx}) {
      for (Subspace sub : {Subspace::kUnitCube, Subspace::kUnitSphere}) {
        double gap = 0.0, excess = -std::numeric_limits<double>::infinity();
        for (std::size_t d = 0; d < opts.draws; ++d) {
          const ModelParams p = random_params(kind, opts.k, sub, 30, 2, rng);
          const double cf = closed_form_max_violation(bc, p, sub).value;
          AdversaryOptions ao;
          ao.steps = opts.steps;
          ao.restarts = opts.restarts;
          ao.learning_rate = opts.learning_rate;
          const AdversarialSet s = find_adversarial_set(bc, p, sub, ao, rng);
          const double it = inconsistency_loss(bc, s, p, TNorm::kGodel);
          gap = std::max(gap, cf - it);
          excess = std::max(excess, it - cf);
        }
        CheckResult r;
        r.name = "adversary/" + std::string(template_name(shape)) + "/" +
                 std::string(model_name(kind)) + "/" + std::string(subspace_name(sub));
        r.trials = opts.draws;
        r.measured = gap;
        r.tolerance = opts.gap_tolerance;
        r.passed = gap <= opts.gap_tolerance && excess <= opts.excess_tolerance;
        char buf[128];
        std::snprintf(buf, sizeof buf, "max gap %.3e (tol %.0e), max excess %.3e (tol %.0e)", gap,
                      opts.gap_tolerance, excess, opts.excess_tolerance);
        r.detail = buf;
        out.push_back(r);
      }
    }
  }
  return out;
}

CheckResult check_distmult_symmetry(std::size_t draws, std::uint64_t seed) {
  Rng rng(seed);
  const Vocabulary vocab = small_vocab(30, 1);
  const BoundClause bc = bind_clause(parse_clause("r0(X,Y) => r0(Y,X)"), vocab);
  double worst = 0.0;
  std::size_t n = 0;
  for (Subspace sub : {Subspace::kUnitCube, Subspace::kUnitSphere}) {
    for (std::size_t d = 0; d < draws; ++d, ++n) {
      const ModelParams p = random_params(ModelKind::kDistMult, 3, sub, 30, 1, rng);
      const double cf = closed_form_max_violation(bc, p, sub).value;
      AdversaryOptions ao;
      ao.steps = 100;
      ao.restarts = 3;
      const AdversarialSet s = find_adversarial_set(bc, p, sub, ao, rng);
      const double it = inconsistency_loss(bc, s, p, TNorm::kGodel);
      worst = std::max({worst, std::abs(cf), std::abs(it)});
    }
  }
  CheckResult r;
  r.name = "adversary/symmetry/distmult/exact-zero";
  r.trials = n;
  r.measured = worst;
  r.tolerance = 0.0;
  r.passed = worst == 0.0;
  char buf[96];
  std::snprintf(buf, sizeof buf, "largest |loss| seen %.3e (must be exactly 0)", worst);
  r.detail = buf;
  return r;
}

CheckResult check_grounded(std::size_t instances, std::uint64_t seed) {
  const ClauseTemplate shapes[] = {ClauseTemplate::kImplication,
                                   ClauseTemplate::kInverseImplication, ClauseTemplate::kSymmetry};
  double excess = 0.0;    // grounded max above the closed form
  double decrease = 0.0;  // loss lost by the seeded ascent
  std::size_t clauses = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    SyntheticSpec spec;
    spec.shape = shapes[i % 3];
    spec.seed = seed + i;
    const SyntheticInstance inst = generate(spec);
    const ModelKind kind = (i / 3) % 2 == 0 ? ModelKind::kDistMult : ModelKind::kComplEx;
    const Subspace sub = (i / 6) % 2 == 0 ? Subspace::kUnitCube : Subspace::kUnitSphere;
    Rng rng(seed + 7919 * (i + 1));
    const ModelParams p = init_params(inst.vocab, kind, 4, sub, rng);
    for (const Clause& c : inst.clauses) {
      const BoundClause bc = bind_clause(c, inst.vocab);
      const GroundedLoss g = grounded_inconsistency_loss(bc, p, TNorm::kGodel);
      const double cf = closed_form_max_violation(bc, p, sub).value;
      excess = std::max(excess, g.max - cf);
      AdversarialSet s = set_from_entities(p, g.worst);
      const double before = inconsistency_loss(bc, s, p, TNorm::kGodel);
      ascend_adversarial_set(bc, p, sub, s, 100, 1e-2, TNorm::kGodel);
      const double after = inconsistency_loss(bc, s, p, TNorm::kGodel);
      decrease = std::max(decrease, before - after);
      ++clauses;
    }
  }
  CheckResult r;
  r.name = "grounded/consistency";
  r.trials = instances;
  r.measured = std::max(excess, decrease);
  r.tolerance = 1e-9;
  r.passed = excess <= 1e-9 && decrease <= 1e-9;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%zu clauses: max grounded-over-closed-form %.3e, max seeded-ascent decrease %.3e",
                clauses, excess, decrease);
  r.detail = buf;
  return r;
}

}  // namespace asr
