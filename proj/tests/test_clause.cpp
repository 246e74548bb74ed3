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

#include <gtest/gtest.h>

#include "asr/clause.hpp"

namespace asr {
namespace {

TEST(ParseClause, InverseWithUnderscorePredicates) {
  const Clause c = parse_clause("_hypernym(X1, X2) => _hyponym(X2, X1)");
  ASSERT_EQ(c.body.size(), 1u);
  EXPECT_EQ(c.body[0], (Atom{"_hypernym", "X1", "X2"}));
  EXPECT_EQ(c.head, (Atom{"_hyponym", "X2", "X1"}));
  EXPECT_EQ(classify_template(c), ClauseTemplate::kInverseImplication);
}

TEST(ParseClause, UncleRule) {
  const Clause c = parse_clause("siblingOf(X1,X2) & parentOf(X2,X3) => uncleOf(X1,X3)");
  EXPECT_EQ(c.body.size(), 2u);
  EXPECT_EQ(c.variables, (std::vector<std::string>{"X1", "X2", "X3"}));
  EXPECT_EQ(classify_template(c), ClauseTemplate::kTransitivityGeneral);
}

TEST(ParseClause, Errors) {
  EXPECT_THROW(parse_clause("r(X1) => s(X1,X2)"), ArityError);
  EXPECT_THROW(parse_clause("r(X1,X2) => s(X1,X3)"), SafetyError);
  EXPECT_THROW(parse_clause("r(X1,X2) s(X1,X2)"), ParseError);
  EXPECT_THROW(parse_clause("r(X1,X2 => s(X1,X2)"), ParseError);
}

TEST(ParseRules, SkipsCommentsAndBlankLines) {
  const auto cs = parse_rules("# rules\n\nr(X,Y) => r(Y,X)\nb(X,Y) => r(X,Y)\n");
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(classify_template(cs[0]), ClauseTemplate::kSymmetry);
  EXPECT_EQ(classify_template(cs[1]), ClauseTemplate::kImplication);
}

TEST(ClassifyTemplate, TableShapes) {
  EXPECT_EQ(classify_template(parse_clause("r(X1,X2) => r(X2,X1)")), ClauseTemplate::kSymmetry);
  EXPECT_EQ(classify_template(parse_clause("b(X1,X2) => r(X2,X1)")),
            ClauseTemplate::kInverseImplication);
  EXPECT_EQ(classify_template(parse_clause("b(X1,X2) & c(X2,X3) => r(X1,X3)")),
            ClauseTemplate::kTransitivityGeneral);
  EXPECT_EQ(classify_template(parse_clause("r(X1,X2) & r(X2,X3) => r(X1,X3)")),
            ClauseTemplate::kTransitivitySame);
  EXPECT_EQ(classify_template(parse_clause("b(X1,X2) & c(X1,X2) => r(X1,X2)")),
            ClauseTemplate::kGeneral);
}

TEST(TemplateName, RoundTrip) {
  for (auto t : {ClauseTemplate::kSymmetry, ClauseTemplate::kImplication,
                 ClauseTemplate::kInverseImplication, ClauseTemplate::kTransitivitySame,
                 ClauseTemplate::kTransitivityGeneral, ClauseTemplate::kGeneral}) {
    EXPECT_EQ(parse_template_name(template_name(t)), t);
  }
  EXPECT_FALSE(parse_template_name("reflexivity").has_value());
}

TEST(BindClause, UnknownPredicate) {
  Vocabulary v;
  v.relation_id("r");
  EXPECT_NO_THROW(bind_clause(parse_clause("r(X,Y) => r(Y,X)"), v));
  EXPECT_THROW(bind_clause(parse_clause("r(X,Y) => s(Y,X)"), v), UnknownSymbolError);
}

TEST(ForwardChain, UncleExample) {
  Vocabulary v;
  const auto facts = load_triples("Mark\tsiblingOf\tJohn\nJohn\tparentOf\tPaul\n", v);
  v.relation_id("uncleOf");
  const auto rules = parse_rules("siblingOf(X1,X2) & parentOf(X2,X3) => uncleOf(X1,X3)\n");
  const ChainResult r = forward_chain(KnowledgeGraph(facts), rules, v);
  EXPECT_TRUE(r.saturated);
  ASSERT_EQ(r.facts.size(), 1u);
  const Triple want{*v.find_relation("uncleOf"), *v.find_entity("Mark"), *v.find_entity("Paul")};
  EXPECT_EQ(r.facts.triples()[0], want);
}

TEST(ForwardChain, EmptyRulesDeriveNothing) {
  Vocabulary v;
  const auto facts = load_triples("a\tr\tb\n", v);
  EXPECT_TRUE(forward_chain(KnowledgeGraph(facts), {}, v).facts.empty());
}

TEST(ForwardChain, SymmetryPlusTransitivityClosure) {
  Vocabulary v;
  const auto facts = load_triples("a\tr\tb\n", v);
  const auto rules = parse_rules("r(X,Y) => r(Y,X)\nr(X,Y) & r(Y,Z) => r(X,Z)\n");
  const ChainResult res = forward_chain(KnowledgeGraph(facts), rules, v);
  const RelationId r = 0;
  const EntityId a = *v.find_entity("a"), b = *v.find_entity("b");
  EXPECT_EQ(res.facts.sorted_unique(),
            (KnowledgeGraph({Triple{r, a, a}, Triple{r, b, a}, Triple{r, b, b}}).sorted_unique()));
}

TEST(ForwardChain, RoundLimitFlagsPartialClosure) {
  Vocabulary v;
  const auto facts = load_triples("a\tr\tb\nb\tr\tc\nc\tr\td\nd\tr\te\n", v);
  const auto rules = parse_rules("r(X,Y) & r(Y,Z) => r(X,Z)\n");
  const ChainResult partial = forward_chain(KnowledgeGraph(facts), rules, v, 1);
  EXPECT_FALSE(partial.saturated);
  const ChainResult full = forward_chain(KnowledgeGraph(facts), rules, v);
  EXPECT_TRUE(full.saturated);
  EXPECT_EQ(full.facts.size(), 6u);
  EXPECT_LT(partial.facts.size(), full.facts.size());
}

}  // namespace
}  // namespace asr
