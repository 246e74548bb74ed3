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

#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "asr/checkpoint.hpp"
#include "asr/evaluation.hpp"
#include "asr/verify.hpp"

namespace asr::cli {

namespace {

DatasetSplit load_data(const DataOptions& d) {
  if (!d.data_dir.empty()) return load_dataset_directory(d.data_dir);
  if (d.train.empty()) throw UsageError("either --data-dir or --train is required");
  return load_split(d.train, d.valid, d.test);
}

// Re-expresses triples of `from` in the ids of `to`.
KnowledgeGraph remap(const KnowledgeGraph& g, const Vocabulary& from, const Vocabulary& to) {
  std::vector<Triple> out;
  out.reserve(g.size());
  for (const auto& t : g.triples()) {
    const auto r = to.find_relation(from.relation_name(t.relation));
    const auto s = to.find_entity(from.entity_name(t.subject));
    const auto o = to.find_entity(from.entity_name(t.object));
    if (!r || !s || !o) {
      throw UnknownSymbolError("vocabulary mismatch: triple (" + from.entity_name(t.subject) +
                               ", " + from.relation_name(t.relation) + ", " +
                               from.entity_name(t.object) + ") is unknown to the checkpoint");
    }
    out.push_back(Triple{*r, *s, *o});
  }
  return KnowledgeGraph(std::move(out));
}

KnowledgeGraph subsample(const KnowledgeGraph& g, double fraction, std::uint64_t seed) {
  if (fraction >= 1.0) return g;
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(g.size())));
  std::vector<std::size_t> idx(g.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed ^ 0x5eed5eedULL);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  std::vector<Triple> out;
  out.reserve(keep);
  for (std::size_t i : idx) out.push_back(g.triples()[i]);
  return KnowledgeGraph(std::move(out));
}

void apply_thread_env(TrainingConfig& c) {
  const char* env = std::getenv("ASR_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw UsageError("ASR_THREADS must be a positive integer");
  c.threads = static_cast<std::size_t>(v);
}

void validate_config(const TrainingConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

// Writes the report to `out` and, when `path` is set, to that file.
void emit(const std::string& report, std::ostream& out, const std::string& path) {
  out << report;
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << report;
  if (!f) throw Error("write failed: " + path);
}

void write_report(std::ostream& os, const MetricsReport& m, const std::string& mode,
                  const std::string& suffix) {
  write_metric(os, "mrr_" + mode + suffix, m.mrr);
  for (const auto& [k, v] : m.hits)
    write_metric(os, "hits@" + std::to_string(k) + "_" + mode + suffix, v);
}

void evaluate_partition(std::ostream& os, const ModelParams& params,
                        const std::vector<Triple>& triples, const KnowledgeGraph& filter,
                        const std::vector<std::size_t>& ks, const std::string& suffix) {
  write_metric(os, "n_test" + suffix, triples.size());
  if (triples.empty()) return;
  write_report(os, metrics(rank_triples(params, triples, nullptr, RankMode::kRaw), ks), "raw",
               suffix);
  write_report(os, metrics(rank_triples(params, triples, &filter, RankMode::kFiltered), ks),
               "filtered", suffix);
}

}  // namespace

int cmd_train(const TrainOptions& opts, std::ostream& out) {
  TrainingConfig config = opts.config;
  apply_thread_env(config);
  validate_config(config);
  if (!(opts.subsample > 0.0 && opts.subsample <= 1.0))
    throw UsageError("--subsample must be in (0, 1]");

  DatasetSplit split = load_data(opts.data);
  std::ostringstream report;
  write_metric(report, "train_size", split.train.size());
  write_metric(report, "valid_size", split.valid.size());
  write_metric(report, "test_size", split.test.size());
  split.train = subsample(split.train, opts.subsample, config.seed);
  write_metric(report, "train_used", split.train.size());

  const std::vector<Clause> clauses =
      opts.rules.empty() ? std::vector<Clause>{} : load_rules_file(opts.rules);
  const TrainingResult result = train(split, clauses, config);
  save_checkpoint(opts.out, result.params, config.subspace, split.vocab);

  write_metric(report, "epochs", result.fact_loss.size());
  write_metric(report, "fact_loss", result.fact_loss.back());
  write_metric(report, "clause_loss", result.clause_loss.back());
  emit(report.str(), out, opts.metrics);
  return kExitOk;
}

int cmd_eval(const EvalOptions& opts, std::ostream& out) {
  if (opts.partition && opts.rules.empty())
    throw UsageError("--partition requires --rules");
  const Checkpoint ck = load_checkpoint(opts.checkpoint);
  const DatasetSplit split = load_data(opts.data);
  if (split.test.empty()) throw Error("no test triples to evaluate");

  std::vector<const KnowledgeGraph*> parts{&split.train, &split.valid, &split.test};
  const KnowledgeGraph known = merge_graphs(parts);
  std::vector<Triple> filter_triples = remap(known, split.vocab, ck.vocab).triples();
  for (const auto& path : opts.filters) {
    Vocabulary v;
    const KnowledgeGraph extra(load_triples_file(path, v));
    const auto mapped = remap(extra, v, ck.vocab).triples();
    filter_triples.insert(filter_triples.end(), mapped.begin(), mapped.end());
  }
  const KnowledgeGraph filter(std::move(filter_triples));
  const KnowledgeGraph test = remap(split.test, split.vocab, ck.vocab);

  std::ostringstream report;
  evaluate_partition(report, ck.params, test.triples(), filter, opts.hits, "");
  if (opts.partition) {
    const std::vector<Clause> clauses = load_rules_file(opts.rules);
    const TestPartition p = partition_test(split, clauses);
    write_metric(report, "n_testII_derived", p.derived_test_II);
    evaluate_partition(report, ck.params, remap(p.test_I, split.vocab, ck.vocab).triples(),
                       filter, opts.hits, "_testI");
    evaluate_partition(report, ck.params, remap(p.test_II, split.vocab, ck.vocab).triples(),
                       filter, opts.hits, "_testII");
  }
  emit(report.str(), out, opts.out);
  return kExitOk;
}

int cmd_synth(const SynthOptions& opts, std::ostream& out) {
  if (opts.out_dir.empty() && opts.replicate == 0)
    throw UsageError("synth needs --out and/or --replicate");
  try {
    opts.spec.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  TrainingConfig config = opts.config;
  apply_thread_env(config);
  validate_config(config);

  std::ostringstream report;
  if (!opts.out_dir.empty()) {
    const SyntheticInstance inst = generate(opts.spec);
    write_instance(inst, opts.out_dir);
    write_metric(report, "train_size", inst.train.size());
    write_metric(report, "test_pos", inst.test_pos.size());
    write_metric(report, "test_neg", inst.test_neg.size());
  }
  if (opts.replicate > 0) {
    const ReplicateResult r = run_replicate(opts.spec, config, opts.replicate);
    for (std::size_t i = 0; i < r.auc_pr.size(); ++i)
      write_metric(report, "auc_pr_run" + std::to_string(i), r.auc_pr[i]);
    write_metric(report, "auc_pr_mean", r.mean);
    write_metric(report, "auc_pr_std", r.stddev);
  }
  emit(report.str(), out, opts.metrics);
  return kExitOk;
}

int cmd_check(const CheckOptions& opts, std::ostream& out) {
  std::vector<CheckResult> results;
  const bool all = opts.suite == "all";
  const auto model = parse_model_name(opts.model);
  const auto sub = parse_subspace_name(opts.subspace);
  if (!model) throw UsageError("unknown model '" + opts.model + "'");
  if (!sub) throw UsageError("unknown subspace '" + opts.subspace + "'");

  if (all || opts.suite == "gradients") {
    const Eigen::Index k = opts.k > 0 ? opts.k : 4;
    for (auto& r : check_gradients(opts.trials, k, opts.seed)) results.push_back(r);
  }
  if (all || opts.suite == "closed-form") {
    if (*sub == Subspace::kUnitCube) {
      const long cap = *model == ModelKind::kComplEx ? 4 : 8;
      const long k = opts.k > 0 ? opts.k : (*model == ModelKind::kComplEx ? 3 : 8);
      if (k > cap) throw UsageError("vertex enumeration supports k <= " + std::to_string(cap));
      results.push_back(check_closed_form_vertices(*model, std::min<std::size_t>(opts.trials, 50),
                                                   k, opts.seed));
    } else {
      if (*model != ModelKind::kDistMult)
        throw UsageError("the sphere grid oracle covers DistMult only");
      results.push_back(
          check_closed_form_sphere_grid(std::min<std::size_t>(opts.trials, 50), 1000, opts.seed));
    }
  }
  if (all || opts.suite == "adversary") {
    AdversaryCheckOptions a;
    a.draws = opts.draws;
    a.k = opts.k > 0 ? opts.k : 3;
    a.steps = opts.tau_a;
    a.restarts = opts.restarts;
    a.learning_rate = opts.lr_a;
    a.seed = opts.seed;
    std::vector<ClauseTemplate> shapes{ClauseTemplate::kSymmetry, ClauseTemplate::kImplication,
                                       ClauseTemplate::kInverseImplication};
    if (opts.shape != "all") {
      const auto t = parse_template_name(opts.shape);
      if (!t || !has_closed_form(*t)) throw UsageError("no closed form for '" + opts.shape + "'");
      shapes = {*t};
    }
    for (auto& r : check_adversary(a, shapes)) results.push_back(r);
  }
  if (all || opts.suite == "symmetry") {
    results.push_back(check_distmult_symmetry(opts.draws, opts.seed));
  }
  if (all || opts.suite == "grounded") {
    results.push_back(check_grounded(opts.instances, opts.seed));
  }

  bool ok = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS" : "FAIL") << '\t' << r.name << '\t' << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitRuntime;
}

namespace {

void add_data_flags(CLI::App* app, DataOptions& d) {
  app->add_option("--data-dir", d.data_dir, "Directory with train/valid/test files");
  app->add_option("--train", d.train, "Training triples (subject<TAB>relation<TAB>object)");
  app->add_option("--valid", d.valid, "Validation triples");
  app->add_option("--test", d.test, "Test triples");
}

struct ConfigNames {
  std::string model = "distmult";
  std::string subspace = "cube";
  std::string tnorm = "godel";
};

void add_training_flags(CLI::App* app, TrainingConfig& c, ConfigNames& n) {
  app->add_option("--model", n.model, "distmult or complex")
      ->check(CLI::IsMember({"distmult", "complex"}));
  app->add_option("--subspace", n.subspace, "cube or sphere")
      ->check(CLI::IsMember({"cube", "sphere"}));
  app->add_option("--tnorm", n.tnorm, "godel or product")
      ->check(CLI::IsMember({"godel", "product"}));
  app->add_option("--k", c.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  app->add_option("--margin", c.margin, "Hinge margin")->check(CLI::PositiveNumber);
  app->add_option("--alpha", c.alpha, "Clause loss weight")->check(CLI::NonNegativeNumber);
  app->add_option("--tau", c.tau, "Outer epochs")->check(CLI::PositiveNumber);
  app->add_option("--tau-d", c.tau_d, "Discriminator steps per epoch")->check(CLI::PositiveNumber);
  app->add_option("--tau-a", c.tau_a, "Adversary steps per epoch")->check(CLI::PositiveNumber);
  app->add_option("--lr", c.lr, "AdaGrad initial learning rate")->check(CLI::PositiveNumber);
  app->add_option("--lr-a", c.lr_a, "Adversary step size")->check(CLI::PositiveNumber);
  app->add_option("--negatives", c.negatives_per_positive, "Corruptions per side per positive");
  app->add_option("--restarts", c.restarts_a, "Adversary restarts")->check(CLI::PositiveNumber);
  app->add_option("--batch-size", c.batch_size, "Items per AdaGrad step")
      ->check(CLI::PositiveNumber);
  app->add_flag("--closed-form", c.closed_form, "Use closed-form losses where available");
  app->add_option("--seed", c.seed, "Random seed");
}

void resolve_names(TrainingConfig& c, const ConfigNames& n) {
  c.model_kind = *parse_model_name(n.model);
  c.subspace = *parse_subspace_name(n.subspace);
  c.tnorm = *parse_tnorm_name(n.tnorm);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Link prediction with adversarial set regularisation"};
  app.name("asr");
  app.require_subcommand(1);

  TrainOptions train_opts;
  ConfigNames train_names;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_data_flags(train_cmd, train_opts.data);
  add_training_flags(train_cmd, train_opts.config, train_names);
  train_cmd->add_option("--rules", train_opts.rules, "Clause file");
  train_cmd->add_option("--out", train_opts.out, "Checkpoint path")->required();
  train_cmd->add_option("--metrics", train_opts.metrics, "Also write the report to this file");
  train_cmd->add_option("--subsample", train_opts.subsample,
                        "Fraction of training triples to use");

  EvalOptions eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "Rank test triples with a checkpoint");
  add_data_flags(eval_cmd, eval_opts.data);
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint, "Checkpoint path")->required();
  eval_cmd->add_option("--filter", eval_opts.filters, "Extra known-triple files");
  eval_cmd->add_option("--rules", eval_opts.rules, "Clause file for Test-I/Test-II");
  eval_cmd->add_flag("--partition", eval_opts.partition, "Report Test-I and Test-II separately");
  eval_cmd->add_option("--hits", eval_opts.hits, "Comma separated cut-offs")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", eval_opts.out, "Also write the report to this file");

  SynthOptions synth_opts;
  ConfigNames synth_names;
  std::string synth_template = "symmetry";
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic data or replicate runs");
  add_training_flags(synth_cmd, synth_opts.config, synth_names);
  synth_cmd->add_option("--template", synth_template, "Clause template")
      ->check(CLI::IsMember({"symmetry", "implication", "inverse-implication", "transitivity",
                             "transitivity-general"}));
  synth_cmd->add_option("--entities", synth_opts.spec.n_entities)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--relations", synth_opts.spec.n_relations)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--pair-prob", synth_opts.spec.pair_prob);
  synth_cmd->add_option("--fact-prob", synth_opts.spec.fact_prob);
  synth_cmd->add_option("--clauses", synth_opts.spec.n_clauses_per_type)
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", synth_opts.out_dir, "Directory for the instance files");
  synth_cmd->add_option("--replicate", synth_opts.replicate, "Number of train/evaluate runs");
  synth_cmd->add_option("--metrics", synth_opts.metrics, "Also write the report to this file");

  CheckOptions check_opts;
  auto* check_cmd = app.add_subcommand("check", "Run numerical self-checks");
  check_cmd->add_option("suite", check_opts.suite, "Which checks to run")
      ->check(CLI::IsMember({"all", "gradients", "closed-form", "adversary", "symmetry",
                             "grounded"}));
  check_cmd->add_option("--trials", check_opts.trials)->check(CLI::PositiveNumber);
  check_cmd->add_option("--k", check_opts.k)->check(CLI::PositiveNumber);
  check_cmd->add_option("--model", check_opts.model)
      ->check(CLI::IsMember({"distmult", "complex"}));
  check_cmd->add_option("--subspace", check_opts.subspace)
      ->check(CLI::IsMember({"cube", "sphere"}));
  check_cmd->add_option("--template", check_opts.shape);
  check_cmd->add_option("--restarts", check_opts.restarts)->check(CLI::PositiveNumber);
  check_cmd->add_option("--tau-a", check_opts.tau_a)->check(CLI::PositiveNumber);
  check_cmd->add_option("--lr-a", check_opts.lr_a)->check(CLI::PositiveNumber);
  check_cmd->add_option("--draws", check_opts.draws)->check(CLI::PositiveNumber);
  check_cmd->add_option("--instances", check_opts.instances)->check(CLI::PositiveNumber);
  check_cmd->add_option("--seed", check_opts.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) {
      resolve_names(train_opts.config, train_names);
      return cmd_train(train_opts, out);
    }
    if (*eval_cmd) return cmd_eval(eval_opts, out);
    if (*synth_cmd) {
      resolve_names(synth_opts.config, synth_names);
      synth_opts.spec.shape = *parse_template_name(synth_template);
      // One --seed drives both the data and the training runs.
      synth_opts.spec.seed = synth_opts.config.seed;
      return cmd_synth(synth_opts, out);
    }
    if (*check_cmd) return cmd_check(check_opts, out);
  } catch (const UsageError& e) {
    err << "asr: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "asr: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace asr::cli
