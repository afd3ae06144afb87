//
// Copyright 2026 The toddag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "toddag/filter.hpp"

using namespace toddag;

namespace {

const char* kRules = R"({
  "state_rules": [
    {"pattern": "\\b(cheap|expensive)\\b", "domain": "hotel", "slot": "pricerange", "value": "$1"},
    {"pattern": "\\bin the (north|south)\\b", "domain": "hotel", "slot": "area", "value": "$1"}
  ],
  "act_rules": [
    {"pattern": "\\b(cheap|expensive)\\b", "act": "inform", "domain": "hotel", "slot": "pricerange"}
  ]})";

Turn hotel_turn() {
  Turn t;
  t.user = "a cheap hotel";
  t.user_delex = "a [value_pricerange] hotel";
  t.delex_map.user = {{"[value_pricerange]", "cheap", 2, 7}};
  t.response = t.response_delex = "ok .";
  t.state.slots["hotel"]["pricerange"] = "cheap";
  t.acts = {{"inform", "hotel", "pricerange"}};
  return t;
}

}  // namespace

TEST(Filter, KeywordPredictorAcceptsFaithfulCandidate) {
  const ConsistencyFilter filter(std::make_shared<RuleTablePredictor>(RuleTablePredictor::parse(kRules)));
  const Turn gold = hotel_turn();
  EXPECT_EQ(filter.check({}, gold, "i want a [value_pricerange] hotel"),
            (FilterDecision{true, FilterReason::kAccepted}));
}

TEST(Filter, ChangedValueIsAStateMismatch) {
  const auto rules = std::make_shared<RuleTablePredictor>(RuleTablePredictor::parse(kRules));
  // The price is not delexicalized here, so a word substitution can change it.
  Turn gold = hotel_turn();
  gold.user_delex = gold.user;
  gold.delex_map.user.clear();
  const ConsistencyFilter filter(rules);
  EXPECT_EQ(filter.check({}, gold, "an expensive hotel"),
            (FilterDecision{false, FilterReason::kStateMismatch}));
}

TEST(Filter, StateFromContextCarriesOver) {
  const ConsistencyFilter filter(std::make_shared<RuleTablePredictor>(RuleTablePredictor::parse(kRules)));
  Turn gold = hotel_turn();
  gold.state.slots["hotel"]["area"] = "north";
  const std::vector<std::string> context{"somewhere in the north", "sure ."};
  EXPECT_TRUE(filter.check(context, gold, "a [value_pricerange] one").accepted);
  EXPECT_EQ(filter.check({}, gold, "a [value_pricerange] one").reason, FilterReason::kStateMismatch);
}

TEST(Filter, ActsCompareAsMultiset) {
  const Turn gold = hotel_turn();
  Prediction p{gold.state, gold.acts};
  EXPECT_TRUE(compare_prediction(p, gold).accepted);
  p.acts.push_back(gold.acts[0]);
  EXPECT_EQ(compare_prediction(p, gold).reason, FilterReason::kActMismatch);
  p.acts = {};
  EXPECT_EQ(compare_prediction(p, gold).reason, FilterReason::kActMismatch);
  p.state.slots["hotel"]["area"] = "north";
  EXPECT_EQ(compare_prediction(p, gold).reason, FilterReason::kStateMismatch);
}

TEST(Filter, ReferencePredictors) {
  const Turn gold = hotel_turn();
  EXPECT_TRUE(ConsistencyFilter(std::make_shared<GoldPredictor>()).check({}, gold, "[value_pricerange]").accepted);
  EXPECT_EQ(ConsistencyFilter(std::make_shared<EmptyPredictor>()).check({}, gold, "[value_pricerange]").reason,
            FilterReason::kStateMismatch);
  EXPECT_EQ(ConsistencyFilter(std::make_shared<ContradictingPredictor>()).check({}, gold, "[value_pricerange]").reason,
            FilterReason::kActMismatch);
}

namespace {

// Records what the predictor was shown.
struct Spy : Predictor {
  std::vector<std::string> context;
  std::string utterance;
  Prediction predict(const PredictInput& in) override {
    context.assign(in.context.begin(), in.context.end());
    utterance = in.utterance;
    return {in.gold.state, in.gold.acts};
  }
};

}  // namespace

TEST(Filter, ContextForms) {
  const Corpus c = load_canonical(oracle::data_path("fixtures/corpus50.json"));
  const Dialog* d = nullptr;
  for (const auto& x : c.dialogs) {
    if (x.turns.size() >= 3) {
      d = &x;
      break;
    }
  }
  ASSERT_NE(d, nullptr);
  const auto lexical = dialog_context(*d, 2, ContextForm::kLexical);
  EXPECT_EQ(lexical, (std::vector<std::string>{d->turns[0].user, d->turns[0].response,
                                               d->turns[1].user, d->turns[1].response}));
  const auto delex = dialog_context(*d, 2, ContextForm::kDelexicalized);
  EXPECT_EQ(delex[2], d->turns[1].user_delex);

  auto spy = std::make_shared<Spy>();
  ConsistencyFilter(spy, ContextForm::kLexical).check(*d, 2, d->turns[2].user_delex);
  EXPECT_EQ(spy->utterance, d->turns[2].user);
  EXPECT_EQ(spy->context, lexical);
  ConsistencyFilter(spy, ContextForm::kDelexicalized).check(*d, 2, d->turns[2].user_delex);
  EXPECT_EQ(spy->utterance, d->turns[2].user_delex);
  EXPECT_EQ(spy->context, delex);
}

TEST(Rules, MalformedTablesAreRejected) {
  EXPECT_ANY_THROW(RuleTablePredictor::parse(R"({"state_rules": [{"pattern": "("}]})"));
  EXPECT_ANY_THROW(RuleTablePredictor::parse("[]"));
}
