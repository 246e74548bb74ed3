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

// Function-free Horn clauses: AST, a small text grammar, shape classification
// and a semi-naive forward chainer.
//
// Grammar (one clause per line, '#' starts a comment line):
//
//   clause    := atom ( '&' atom )* '=>' atom [ number ]
//   atom      := predicate '(' variable ( ',' variable )* ')'
//   predicate := [A-Za-z0-9_/.:-]+
//   variable  := ( [A-Z] | '?' ) [A-Za-z0-9_]*
//
// A trailing number (a rule confidence, as shipped with some rule sets) is
// parsed and kept on the clause but never used for training.

#ifndef ASR_CLAUSE_HPP_
#define ASR_CLAUSE_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asr/error.hpp"
#include "asr/graph.hpp"

namespace asr {

class ArityError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// A head variable that does not occur in the body.
class SafetyError : public ParseError {
 public:
  using ParseError::ParseError;
};

struct Atom {
  std::string predicate;
  std::string arg1;
  std::string arg2;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Clause {
  std::vector<Atom> body;
  Atom head;
  /// Distinct variables in order of first appearance (body, then head).
  std::vector<std::string> variables;
  std::optional<double> confidence;

  std::size_t variable_index(std::string_view name) const;
  std::string to_string() const;
};

enum class ClauseTemplate {
  kSymmetry,             // r(X1,X2) => r(X2,X1)
  kImplication,          // b(X1,X2) => r(X1,X2)
  kInverseImplication,   // b(X1,X2) => r(X2,X1)
  kTransitivitySame,     // r(X1,X2) & r(X2,X3) => r(X1,X3)
  kTransitivityGeneral,  // r(X1,X2) & s(X2,X3) => t(X1,X3), r,s,t distinct
  kGeneral,
};

std::string_view template_name(ClauseTemplate t);
std::optional<ClauseTemplate> parse_template_name(std::string_view name);

Clause parse_clause(std::string_view line);

/// Parses a rules file body: one clause per line, blank and '#' lines skipped.
/// Parse errors are rethrown with the line number prepended to the message.
std::vector<Clause> parse_rules(std::string_view text);
std::vector<Clause> load_rules_file(const std::filesystem::path& path);

ClauseTemplate classify_template(const Clause& clause);

/// An atom whose predicate is resolved to a relation id and whose arguments
/// are indices into the owning clause's variable list.
struct BoundAtom {
  RelationId relation = 0;
  std::size_t arg1 = 0;
  std::size_t arg2 = 0;
};

struct BoundClause {
  std::vector<BoundAtom> body;
  BoundAtom head;
  std::size_t num_variables = 0;
  ClauseTemplate shape = ClauseTemplate::kGeneral;
};

/// Throws UnknownSymbolError when a predicate is not a known relation.
BoundClause bind_clause(const Clause& clause, const Vocabulary& vocab);

struct ChainResult {
  /// Derived facts absent from the input graph, sorted by (relation, subject, object).
  KnowledgeGraph facts;
  bool saturated = true;
  std::size_t rounds = 0;
};

inline constexpr std::size_t kDefaultMaxRounds = 64;

/// Saturates `clauses` over `graph`. Clauses whose body mentions a relation
/// missing from `vocab` can never fire and are skipped.
ChainResult forward_chain(const KnowledgeGraph& graph, const std::vector<Clause>& clauses,
                          const Vocabulary& vocab, std::size_t max_rounds = kDefaultMaxRounds);

}  // namespace asr

#endif  // ASR_CLAUSE_HPP_
