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

#include "asr/clause.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace asr {

namespace {

bool is_predicate_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '/' || c == '.' ||
         c == ':' || c == '-';
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class ClauseParser {
 public:
  explicit ClauseParser(std::string_view text) : text_(text) {}

  Clause parse() {
    Clause clause;
    clause.body.push_back(atom());
    while (peek_is('&')) {
      ++pos_;
      clause.body.push_back(atom());
    }
    skip_ws();
    if (text_.substr(pos_, 2) != "=>") fail("expected '&' or '=>'");
    pos_ += 2;
    const std::size_t head_pos = skip_ws();
    clause.head = atom();
    skip_ws();
    if (pos_ < text_.size()) clause.confidence = number();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");

    for (const auto& a : clause.body) {
      for (const auto* v : {&a.arg1, &a.arg2}) {
        if (std::find(clause.variables.begin(), clause.variables.end(), *v) ==
            clause.variables.end()) {
          clause.variables.push_back(*v);
        }
      }
    }
    for (const auto* v : {&clause.head.arg1, &clause.head.arg2}) {
      if (std::find(clause.variables.begin(), clause.variables.end(), *v) ==
          clause.variables.end()) {
        throw SafetyError("head variable " + *v + " does not occur in the body", head_pos);
      }
    }
    return clause;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("syntax error at offset " + std::to_string(pos_) + ": " + msg, pos_);
  }

  std::size_t skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek_is(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Atom atom() {
    const std::size_t start = skip_ws();
    while (pos_ < text_.size() && is_predicate_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected predicate name");
    Atom a;
    a.predicate = std::string(text_.substr(start, pos_ - start));
    expect('(');
    std::vector<std::string> args;
    args.push_back(variable());
    while (peek_is(',')) {
      ++pos_;
      args.push_back(variable());
    }
    expect(')');
    if (args.size() != 2) {
      throw ArityError("atom " + a.predicate + " at offset " + std::to_string(start) + " has arity " +
                           std::to_string(args.size()) + ", expected 2",
                       start);
    }
    a.arg1 = std::move(args[0]);
    a.arg2 = std::move(args[1]);
    return a;
  }

  std::string variable() {
    const std::size_t start = skip_ws();
    if (pos_ >= text_.size()) fail("expected variable");
    const char c = text_[pos_];
    if (!(std::isupper(static_cast<unsigned char>(c)) || c == '?')) {
      if (is_ident_char(c)) fail("constants are not allowed in clause atoms");
      fail("expected variable");
    }
    ++pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const auto token = text_.substr(start, pos_ - start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      pos_ = start;
      fail("unexpected trailing input");
    }
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t Clause::variable_index(std::string_view name) const {
  auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) throw UnknownSymbolError("unbound variable " + std::string(name));
  return static_cast<std::size_t>(it - variables.begin());
}

std::string Clause::to_string() const {
  std::ostringstream out;
  auto put = [&](const Atom& a) { out << a.predicate << '(' << a.arg1 << ", " << a.arg2 << ')'; };
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out << " & ";
    put(body[i]);
  }
  out << " => ";
  put(head);
  return out.str();
}

std::string_view template_name(ClauseTemplate t) {
  switch (t) {
    case ClauseTemplate::kSymmetry: return "symmetry";
    case ClauseTemplate::kImplication: return "implication";
    case ClauseTemplate::kInverseImplication: return "inverse-implication";
    case ClauseTemplate::kTransitivitySame: return "transitivity";
    case ClauseTemplate::kTransitivityGeneral: return "transitivity-general";
    case ClauseTemplate::kGeneral: return "general";
  }
  return "general";
}

std::optional<ClauseTemplate> parse_template_name(std::string_view name) {
  for (auto t : {ClauseTemplate::kSymmetry, ClauseTemplate::kImplication,
                 ClauseTemplate::kInverseImplication, ClauseTemplate::kTransitivitySame,
                 ClauseTemplate::kTransitivityGeneral, ClauseTemplate::kGeneral}) {
    if (template_name(t) == name) return t;
  }
  return std::nullopt;
}

Clause parse_clause(std::string_view line) { return ClauseParser(line).parse(); }

std::vector<Clause> parse_rules(std::string_view text) {
  std::vector<Clause> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    if (line.back() == '\r') line.remove_suffix(1);
    try {
      out.push_back(parse_clause(line));
    } catch (const ArityError& e) {
      throw ArityError("line " + std::to_string(line_no) + ": " + e.what(), e.position());
    } catch (const SafetyError& e) {
      throw SafetyError("line " + std::to_string(line_no) + ": " + e.what(), e.position());
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), e.position());
    }
  }
  return out;
}

std::vector<Clause> load_rules_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rules file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_rules(buf.str());
}

ClauseTemplate classify_template(const Clause& c) {
  if (c.body.size() == 1) {
    const Atom& b = c.body[0];
    const Atom& h = c.head;
    if (b.arg1 == b.arg2) return ClauseTemplate::kGeneral;
    const bool same_order = h.arg1 == b.arg1 && h.arg2 == b.arg2;
    const bool swapped = h.arg1 == b.arg2 && h.arg2 == b.arg1;
    if (swapped) {
      return b.predicate == h.predicate ? ClauseTemplate::kSymmetry
                                        : ClauseTemplate::kInverseImplication;
    }
    if (same_order && b.predicate != h.predicate) return ClauseTemplate::kImplication;
    return ClauseTemplate::kGeneral;
  }
  if (c.body.size() == 2 && c.variables.size() == 3) {
    // A(x, y) & B(y, z) => C(x, z), in either body order.
    for (int order = 0; order < 2; ++order) {
      const Atom& first = c.body[order];
      const Atom& second = c.body[1 - order];
      const bool chain = first.arg2 == second.arg1 && first.arg1 != first.arg2 &&
                         second.arg1 != second.arg2 && first.arg1 != second.arg2 &&
                         c.head.arg1 == first.arg1 && c.head.arg2 == second.arg2;
      if (!chain) continue;
      const auto& p = first.predicate;
      const auto& q = second.predicate;
      const auto& r = c.head.predicate;
      if (p == q && q == r) return ClauseTemplate::kTransitivitySame;
      if (p != q && q != r && p != r) return ClauseTemplate::kTransitivityGeneral;
      return ClauseTemplate::kGeneral;
    }
  }
  return ClauseTemplate::kGeneral;
}

BoundClause bind_clause(const Clause& clause, const Vocabulary& vocab) {
  auto bind = [&](const Atom& a) {
    auto rel = vocab.find_relation(a.predicate);
    if (!rel) throw UnknownSymbolError("clause predicate not in vocabulary: " + a.predicate);
    return BoundAtom{*rel, clause.variable_index(a.arg1), clause.variable_index(a.arg2)};
  };
  BoundClause out;
  for (const auto& a : clause.body) out.body.push_back(bind(a));
  out.head = bind(clause.head);
  out.num_variables = clause.variables.size();
  out.shape = classify_template(clause);
  return out;
}

namespace {

// Fact indexes used by the join: per relation, subject -> objects and
// object -> subjects.
struct FactIndex {
  std::unordered_map<RelationId, std::vector<std::pair<EntityId, EntityId>>> by_relation;
  std::map<std::pair<RelationId, EntityId>, std::vector<EntityId>> objects_of;
  std::map<std::pair<RelationId, EntityId>, std::vector<EntityId>> subjects_of;
  std::unordered_set<Triple, TripleHash> all;

  bool add(const Triple& t) {
    if (!all.insert(t).second) return false;
    by_relation[t.relation].emplace_back(t.subject, t.object);
    objects_of[{t.relation, t.subject}].push_back(t.object);
    subjects_of[{t.relation, t.object}].push_back(t.subject);
    return true;
  }
};

constexpr std::size_t kUnbound = static_cast<std::size_t>(-1);

class Joiner {
 public:
  Joiner(const BoundClause& clause, const FactIndex& index, std::vector<Triple>& out,
         std::unordered_set<Triple, TripleHash>& emitted)
      : clause_(clause), index_(index), out_(out), emitted_(emitted),
        binding_(clause.num_variables, kUnbound) {}

  // Seeds body atom `seed` with a fact from the last round's delta.
  void run_seeded(std::size_t seed, const std::vector<Triple>& delta) {
    const BoundAtom& atom = clause_.body[seed];
    for (const auto& t : delta) {
      if (t.relation != atom.relation) continue;
      std::vector<std::size_t> touched;
      if (!bind(atom.arg1, t.subject, touched) || !bind(atom.arg2, t.object, touched)) {
        unbind(touched);
        continue;
      }
      join(0, seed);
      unbind(touched);
    }
  }

 private:
  bool bind(std::size_t var, EntityId e, std::vector<std::size_t>& touched) {
    if (binding_[var] == kUnbound) {
      binding_[var] = e;
      touched.push_back(var);
      return true;
    }
    return binding_[var] == e;
  }

  void unbind(const std::vector<std::size_t>& touched) {
    for (auto v : touched) binding_[v] = kUnbound;
  }

  void emit() {
    const BoundAtom& h = clause_.head;
    Triple t{h.relation, static_cast<EntityId>(binding_[h.arg1]),
             static_cast<EntityId>(binding_[h.arg2])};
    if (!index_.all.count(t) && emitted_.insert(t).second) out_.push_back(t);
  }

  void join(std::size_t i, std::size_t skip) {
    if (i == clause_.body.size()) {
      emit();
      return;
    }
    if (i == skip) {
      join(i + 1, skip);
      return;
    }
    const BoundAtom& atom = clause_.body[i];
    const auto s = binding_[atom.arg1];
    const auto o = binding_[atom.arg2];
    auto try_pair = [&](EntityId subj, EntityId obj) {
      std::vector<std::size_t> touched;
      if (bind(atom.arg1, subj, touched) && bind(atom.arg2, obj, touched)) join(i + 1, skip);
      unbind(touched);
    };
    if (s != kUnbound && o != kUnbound) {
      if (index_.all.count(Triple{atom.relation, static_cast<EntityId>(s),
                                  static_cast<EntityId>(o)})) {
        join(i + 1, skip);
      }
    } else if (s != kUnbound) {
      auto it = index_.objects_of.find({atom.relation, static_cast<EntityId>(s)});
      if (it == index_.objects_of.end()) return;
      const auto& objects = it->second;
      for (auto obj : objects) try_pair(static_cast<EntityId>(s), obj);
    } else if (o != kUnbound) {
      auto it = index_.subjects_of.find({atom.relation, static_cast<EntityId>(o)});
      if (it == index_.subjects_of.end()) return;
      const auto& subjects = it->second;
      for (auto subj : subjects) try_pair(subj, static_cast<EntityId>(o));
    } else {
      auto it = index_.by_relation.find(atom.relation);
      if (it == index_.by_relation.end()) return;
      const auto& pairs = it->second;
      for (const auto& [subj, obj] : pairs) try_pair(subj, obj);
    }
  }

  const BoundClause& clause_;
  const FactIndex& index_;
  std::vector<Triple>& out_;
  std::unordered_set<Triple, TripleHash>& emitted_;
  std::vector<std::size_t> binding_;
};

}  // namespace

ChainResult forward_chain(const KnowledgeGraph& graph, const std::vector<Clause>& clauses,
                          const Vocabulary& vocab, std::size_t max_rounds) {
  if (max_rounds == 0) throw ConfigError("forward_chain: max_rounds must be >= 1");

  std::vector<BoundClause> bound;
  for (const auto& c : clauses) {
    const bool body_known = std::all_of(c.body.begin(), c.body.end(), [&](const Atom& a) {
      return vocab.find_relation(a.predicate).has_value();
    });
    if (!body_known) continue;
    bound.push_back(bind_clause(c, vocab));
  }

  FactIndex index;
  std::vector<Triple> delta = graph.sorted_unique();
  for (const auto& t : delta) index.add(t);

  std::vector<Triple> derived;
  ChainResult result;
  result.saturated = false;
  if (bound.empty()) {
    result.saturated = true;
  } else {
    for (std::size_t round = 0; round < max_rounds; ++round) {
      std::vector<Triple> fresh;
      std::unordered_set<Triple, TripleHash> emitted;
      for (const auto& clause : bound) {
        Joiner joiner(clause, index, fresh, emitted);
        for (std::size_t seed = 0; seed < clause.body.size(); ++seed) {
          joiner.run_seeded(seed, delta);
        }
      }
      if (fresh.empty()) {
        result.saturated = true;
        break;
      }
      ++result.rounds;
      std::sort(fresh.begin(), fresh.end());
      for (const auto& t : fresh) index.add(t);
      derived.insert(derived.end(), fresh.begin(), fresh.end());
      delta = std::move(fresh);
    }
  }
  std::sort(derived.begin(), derived.end());
  result.facts = KnowledgeGraph(std::move(derived));
  return result;
}

}  // namespace asr
