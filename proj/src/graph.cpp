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

#include "asr/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "asr/error.hpp"

namespace asr {

namespace {

template <typename Id>
Id lookup_or_insert(std::string_view name, std::vector<std::string>& names,
                    std::unordered_map<std::string, Id>& index, bool frozen, const char* kind) {
  std::string key(name);
  if (auto it = index.find(key); it != index.end()) return it->second;
  if (frozen) throw UnknownSymbolError(std::string("unknown ") + kind + ": " + key);
  const auto id = static_cast<Id>(names.size());
  names.push_back(key);
  index.emplace(std::move(key), id);
  return id;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

EntityId Vocabulary::entity_id(std::string_view name) {
  return lookup_or_insert(name, entities_, entity_index_, frozen_, "entity");
}

RelationId Vocabulary::relation_id(std::string_view name) {
  return lookup_or_insert(name, relations_, relation_index_, frozen_, "relation");
}

std::optional<EntityId> Vocabulary::find_entity(std::string_view name) const {
  auto it = entity_index_.find(std::string(name));
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> Vocabulary::find_relation(std::string_view name) const {
  auto it = relation_index_.find(std::string(name));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary freeze_vocabulary(Vocabulary vocab) {
  vocab.freeze();
  return vocab;
}

KnowledgeGraph::KnowledgeGraph(std::vector<Triple> triples) : triples_(std::move(triples)) {
  known_.reserve(triples_.size());
  known_.insert(triples_.begin(), triples_.end());
}

std::vector<Triple> KnowledgeGraph::sorted_unique() const {
  std::vector<Triple> out(known_.begin(), known_.end());
  std::sort(out.begin(), out.end());
  return out;
}

KnowledgeGraph build_graph(std::vector<Triple> triples) { return KnowledgeGraph(std::move(triples)); }

KnowledgeGraph merge_graphs(const std::vector<const KnowledgeGraph*>& graphs) {
  std::vector<Triple> all;
  for (const auto* g : graphs) all.insert(all.end(), g->triples().begin(), g->triples().end());
  return KnowledgeGraph(std::move(all));
}

std::vector<Triple> load_triples(std::istream& in, Vocabulary& vocab) {
  std::vector<Triple> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;

    std::string_view fields[3];
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      const auto field = line.substr(start, tab == std::string_view::npos ? std::string_view::npos
                                                                           : tab - start);
      if (n < 3) fields[n] = field;
      ++n;
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (n != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 tab-separated fields, got " +
                           std::to_string(n),
                       line_no);
    }
    for (const auto& f : fields) {
      if (f.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty field", line_no);
    }
    Triple t;
    t.subject = vocab.entity_id(fields[0]);
    t.relation = vocab.relation_id(fields[1]);
    t.object = vocab.entity_id(fields[2]);
    out.push_back(t);
  }
  return out;
}

std::vector<Triple> load_triples(std::string_view text, Vocabulary& vocab) {
  std::istringstream in{std::string(text)};
  return load_triples(in, vocab);
}

std::vector<Triple> load_triples_file(const std::filesystem::path& path, Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open triple file: " + path.string());
  return load_triples(in, vocab);
}

void write_triples(std::ostream& out, const std::vector<Triple>& triples, const Vocabulary& vocab) {
  for (const auto& t : triples) {
    out << vocab.entity_name(t.subject) << '\t' << vocab.relation_name(t.relation) << '\t'
        << vocab.entity_name(t.object) << '\n';
  }
}

void write_triples_file(const std::filesystem::path& path, const std::vector<Triple>& triples,
                        const Vocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write triple file: " + path.string());
  write_triples(out, triples, vocab);
  if (!out) throw Error("write failed: " + path.string());
}

DatasetSplit load_split(const std::filesystem::path& train, const std::filesystem::path& valid,
                        const std::filesystem::path& test) {
  DatasetSplit split;
  auto train_triples = load_triples_file(train, split.vocab);
  std::vector<Triple> valid_triples, test_triples;
  if (!valid.empty()) valid_triples = load_triples_file(valid, split.vocab);
  if (!test.empty()) test_triples = load_triples_file(test, split.vocab);
  split.vocab.freeze();
  split.train = build_graph(std::move(train_triples));
  split.valid = build_graph(std::move(valid_triples));
  split.test = build_graph(std::move(test_triples));
  return split;
}

namespace {

std::filesystem::path find_first(const std::filesystem::path& dir,
                                 std::initializer_list<const char*> stems) {
  for (const char* stem : stems) {
    for (const char* ext : {".txt", ".tsv", ""}) {
      auto p = dir / (std::string(stem) + ext);
      if (std::filesystem::is_regular_file(p)) return p;
    }
  }
  // Release-style names such as fb122_triples.train.
  std::vector<std::filesystem::path> hits;
  for (const char* stem : stems) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == std::string(".") + stem)
        hits.push_back(entry.path());
    }
    if (!hits.empty()) break;
  }
  if (hits.empty()) return {};
  std::sort(hits.begin(), hits.end());
  return hits.front();
}

}  // namespace

DatasetSplit load_dataset_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  const auto train = find_first(dir, {"train"});
  if (train.empty()) throw Error("no train file in " + dir.string());
  const auto valid = find_first(dir, {"valid", "dev"});
  const auto test = find_first(dir, {"test"});
  const auto test_one = find_first(dir, {"testI", "test_I", "test-I", "test1"});
  const auto test_two = find_first(dir, {"testII", "test_II", "test-II", "test2"});

  DatasetSplit split;
  auto train_triples = load_triples_file(train, split.vocab);
  std::vector<Triple> valid_triples, test_triples, one, two;
  if (!valid.empty()) valid_triples = load_triples_file(valid, split.vocab);
  if (!test_one.empty()) one = load_triples_file(test_one, split.vocab);
  if (!test_two.empty()) two = load_triples_file(test_two, split.vocab);
  if (!test.empty()) {
    test_triples = load_triples_file(test, split.vocab);
  } else {
    test_triples = one;
    test_triples.insert(test_triples.end(), two.begin(), two.end());
  }
  split.vocab.freeze();
  split.train = build_graph(std::move(train_triples));
  split.valid = build_graph(std::move(valid_triples));
  split.test = build_graph(std::move(test_triples));

  if (!test_one.empty() && !test_two.empty()) {
    KnowledgeGraph g1(std::move(one)), g2(std::move(two));
    std::size_t covered = 0;
    for (const auto& t : split.test.known()) {
      const bool in1 = g1.contains(t), in2 = g2.contains(t);
      if (in1 && in2) throw Error("test partitions overlap");
      if (in1 || in2) ++covered;
    }
    if (covered != split.test.num_known() || g1.num_known() + g2.num_known() != covered) {
      throw Error("shipped test partitions do not partition the test set");
    }
    split.test_partitions.emplace("Test-I", std::move(g1));
    split.test_partitions.emplace("Test-II", std::move(g2));
  }
  return split;
}

}  // namespace asr
