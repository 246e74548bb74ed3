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

#ifndef ASR_GRAPH_HPP_
#define ASR_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace asr {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

/// Entity and relation symbol tables with dense ids assigned in first-seen
/// order. Once frozen, looking up an unseen name throws instead of inserting.
class Vocabulary {
 public:
  EntityId entity_id(std::string_view name);
  RelationId relation_id(std::string_view name);

  std::optional<EntityId> find_entity(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;

  const std::string& entity_name(EntityId id) const { return entities_.at(id); }
  const std::string& relation_name(RelationId id) const { return relations_.at(id); }

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<std::string>& relations() const { return relations_; }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  bool operator==(const Vocabulary& other) const {
    return entities_ == other.entities_ && relations_ == other.relations_;
  }

 private:
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, EntityId> entity_index_;
  std::unordered_map<std::string, RelationId> relation_index_;
  bool frozen_ = false;
};

/// Returns a frozen copy; freezing an already frozen vocabulary is a no-op.
Vocabulary freeze_vocabulary(Vocabulary vocab);

struct Triple {
  RelationId relation = 0;
  EntityId subject = 0;
  EntityId object = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(t.subject) << 32) | t.object;
    h ^= static_cast<std::uint64_t>(t.relation) * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
  }
};

/// A list of facts plus a deduplicated membership index over them.
/// Duplicates stay in `triples()` (they weight the fact loss).
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  explicit KnowledgeGraph(std::vector<Triple> triples);

  bool contains(const Triple& t) const { return known_.count(t) != 0; }
  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  std::size_t num_known() const { return known_.size(); }
  bool empty() const { return triples_.empty(); }
  const std::unordered_set<Triple, TripleHash>& known() const { return known_; }

  /// Facts in (relation, subject, object) order, deduplicated.
  std::vector<Triple> sorted_unique() const;

 private:
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> known_;
};

KnowledgeGraph build_graph(std::vector<Triple> triples);

/// Union of several graphs, concatenating their triple lists.
KnowledgeGraph merge_graphs(const std::vector<const KnowledgeGraph*>& graphs);

struct DatasetSplit {
  Vocabulary vocab;
  KnowledgeGraph train;
  KnowledgeGraph valid;
  KnowledgeGraph test;
  /// Shipped test partitions keyed by name, e.g. "Test-I" and "Test-II".
  std::map<std::string, KnowledgeGraph> test_partitions;
};

/// Parses subject<TAB>relation<TAB>object lines. Unknown names are appended
/// to `vocab` unless it is frozen. Lines starting with '#' and blank lines are
/// skipped. Throws ParseError carrying the 1-based line number.
std::vector<Triple> load_triples(std::string_view text, Vocabulary& vocab);
std::vector<Triple> load_triples(std::istream& in, Vocabulary& vocab);
std::vector<Triple> load_triples_file(const std::filesystem::path& path, Vocabulary& vocab);

void write_triples(std::ostream& out, const std::vector<Triple>& triples, const Vocabulary& vocab);
void write_triples_file(const std::filesystem::path& path, const std::vector<Triple>& triples,
                        const Vocabulary& vocab);

/// Loads train/valid/test files (valid and test may be empty paths) into one
/// shared vocabulary, built over every file before it is frozen.
DatasetSplit load_split(const std::filesystem::path& train, const std::filesystem::path& valid,
                        const std::filesystem::path& test);

/// Loads a dataset directory holding train/valid/test files (.txt or .tsv),
/// plus optional test-I/test-II partition files (testI, test_I, test-I ...).
/// Throws if the shipped partitions do not partition the test set.
DatasetSplit load_dataset_directory(const std::filesystem::path& dir);

}  // namespace asr

#endif  // ASR_GRAPH_HPP_
