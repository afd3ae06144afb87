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

#pragma once

#include <filesystem>
#include <memory>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toddag/backend.hpp"
#include "toddag/corpus.hpp"

namespace toddag {

// Input to a predictor. `context` alternates user and system texts of the
// preceding turns. `gold` is the annotated turn being checked; it exists
// for oracle predictors in tests and must be ignored by real ones.
struct PredictInput {
  std::span<const std::string> context;
  std::string_view utterance;
  const Turn& gold;
};

// Maps (dialog context, user utterance) to a dialog state and system acts.
// Implementations must be deterministic and safe to call concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Prediction predict(const PredictInput& input) = 0;
};

// Returns the gold annotations, so every candidate passes.
class GoldPredictor : public Predictor {
 public:
  Prediction predict(const PredictInput& input) override;
};

// Returns an empty state and no acts.
class EmptyPredictor : public Predictor {
 public:
  Prediction predict(const PredictInput& input) override;
};

// Gold state plus one extra act, so every candidate fails on acts.
class ContradictingPredictor : public Predictor {
 public:
  Prediction predict(const PredictInput& input) override;
};

// Calls /v1/predict on a trained model behind the backend protocol.
class HttpPredictor : public Predictor {
 public:
  explicit HttpPredictor(std::shared_ptr<BackendClient> client) : client_(std::move(client)) {}
  Prediction predict(const PredictInput& input) override;

 private:
  std::shared_ptr<BackendClient> client_;
};

// Keyword rules loaded from JSON:
//   {"state_rules": [{"pattern", "domain", "slot", "value"}],
//    "act_rules":   [{"pattern", "act", "domain", "slot"}]}
// Patterns are case-insensitive ECMAScript regexes searched in the text;
// "value" may use $1.. for capture groups. State rules run over every user
// utterance in the context and then the candidate, later matches
// overwriting earlier ones. Act rules run over the candidate only, in rule
// order, each contributing at most one act.
class RuleTablePredictor : public Predictor {
 public:
  struct StateRule {
    std::regex pattern;
    std::string domain, slot, value;
  };
  struct ActRule {
    std::regex pattern;
    SystemAct act;
  };

  static RuleTablePredictor parse(std::string_view json_text);
  static RuleTablePredictor load(const std::filesystem::path& path);

  Prediction predict(const PredictInput& input) override;
  Prediction predict(std::span<const std::string> context, std::string_view utterance) const;

 private:
  std::vector<StateRule> state_rules_;
  std::vector<ActRule> act_rules_;
};

enum class FilterReason { kAccepted, kStateMismatch, kActMismatch };

std::string_view reason_name(FilterReason reason);

struct FilterDecision {
  bool accepted = false;
  FilterReason reason = FilterReason::kStateMismatch;

  bool operator==(const FilterDecision&) const = default;
};

// Which form of the dialog the predictor sees.
enum class ContextForm { kLexical, kDelexicalized };

// Alternating user/system texts of turns [0, turn_index).
std::vector<std::string> dialog_context(const Dialog& dialog, std::size_t turn_index,
                                        ContextForm form);

// Semantics-preservation check: a candidate is accepted iff the predicted
// state equals the gold state as a set of (domain, slot, value) triples and
// the predicted acts equal the gold acts as a multiset. State is compared
// first. Predictor failures propagate as exceptions.
class ConsistencyFilter {
 public:
  explicit ConsistencyFilter(std::shared_ptr<Predictor> predictor,
                             ContextForm form = ContextForm::kLexical)
      : predictor_(std::move(predictor)), form_(form) {}

  // `candidate_delex` is the candidate user_delex for `gold`. In lexical
  // form it is relexicalized with gold's user delex map before prediction.
  FilterDecision check(std::span<const std::string> context, const Turn& gold,
                       std::string_view candidate_delex) const;

  // Convenience: context taken from dialog.turns[0, turn_index).
  FilterDecision check(const Dialog& dialog, std::size_t turn_index,
                       std::string_view candidate_delex) const;

  ContextForm form() const { return form_; }

 private:
  std::shared_ptr<Predictor> predictor_;
  ContextForm form_;
};

FilterDecision compare_prediction(const Prediction& predicted, const Turn& gold);

}  // namespace toddag
