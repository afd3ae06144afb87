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

#include "toddag/filter.hpp"

#include <algorithm>

#include "json.hpp"
#include "toddag/delex.hpp"

namespace toddag {

using nlohmann::json;

Prediction GoldPredictor::predict(const PredictInput& input) {
  return {input.gold.state, input.gold.acts};
}

Prediction EmptyPredictor::predict(const PredictInput&) { return {}; }

Prediction ContradictingPredictor::predict(const PredictInput& input) {
  Prediction p{input.gold.state, input.gold.acts};
  p.acts.push_back({"contradict", "", ""});
  return p;
}

Prediction HttpPredictor::predict(const PredictInput& input) {
  return client_->predict({input.context.begin(), input.context.end()}, input.utterance);
}

// ---------------------------------------------------------------------------

namespace {

std::regex compile(const json& rule, const std::string& where) {
  if (!rule.contains("pattern") || !rule["pattern"].is_string()) {
    throw Error(where + ": missing string 'pattern'");
  }
  try {
    return std::regex(rule["pattern"].get<std::string>(),
                      std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw Error(where + ": bad pattern: " + e.what());
  }
}

std::string field(const json& rule, const char* key, const std::string& where,
                  bool required = true) {
  if (!rule.contains(key)) {
    if (required) throw Error(where + ": missing '" + key + "'");
    return {};
  }
  if (!rule[key].is_string()) throw Error(where + ": '" + key + "' must be a string");
  return rule[key].get<std::string>();
}

}  // namespace

RuleTablePredictor RuleTablePredictor::parse(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("rule table: ") + e.what());
  }
  if (!root.is_object()) throw Error("rule table: top level must be an object");
  RuleTablePredictor out;
  const json empty = json::array();
  const json& states = root.contains("state_rules") ? root["state_rules"] : empty;
  const json& acts = root.contains("act_rules") ? root["act_rules"] : empty;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string where = "state_rules[" + std::to_string(i) + "]";
    out.state_rules_.push_back({compile(states[i], where), field(states[i], "domain", where),
                                field(states[i], "slot", where),
                                field(states[i], "value", where)});
  }
  for (std::size_t i = 0; i < acts.size(); ++i) {
    const std::string where = "act_rules[" + std::to_string(i) + "]";
    out.act_rules_.push_back(
        {compile(acts[i], where),
         {field(acts[i], "act", where), field(acts[i], "domain", where),
          field(acts[i], "slot", where, false)}});
  }
  return out;
}

RuleTablePredictor RuleTablePredictor::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

Prediction RuleTablePredictor::predict(const PredictInput& input) {
  return predict(input.context, input.utterance);
}

Prediction RuleTablePredictor::predict(std::span<const std::string> context,
                                       std::string_view utterance) const {
  Prediction out;
  auto apply_state = [&](const std::string& text) {
    for (const auto& rule : state_rules_) {
      std::smatch m;
      if (std::regex_search(text, m, rule.pattern)) {
        out.state.slots[rule.domain][rule.slot] = m.format(rule.value);
      }
    }
  };
  for (std::size_t i = 0; i < context.size(); i += 2) apply_state(context[i]);
  const std::string candidate(utterance);
  apply_state(candidate);
  for (auto& [domain, slots] : out.state.slots) {
    std::erase_if(slots, [](const auto& sv) { return sv.second.empty(); });
  }
  std::erase_if(out.state.slots, [](const auto& kv) { return kv.second.empty(); });
  for (const auto& rule : act_rules_) {
    if (std::regex_search(candidate, rule.pattern)) out.acts.push_back(rule.act);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view reason_name(FilterReason reason) {
  switch (reason) {
    case FilterReason::kAccepted:
      return "accepted";
    case FilterReason::kStateMismatch:
      return "state_mismatch";
    case FilterReason::kActMismatch:
      return "act_mismatch";
  }
  return "?";
}

std::vector<std::string> dialog_context(const Dialog& dialog, std::size_t turn_index,
                                        ContextForm form) {
  std::vector<std::string> context;
  context.reserve(2 * turn_index);
  for (std::size_t i = 0; i < turn_index && i < dialog.turns.size(); ++i) {
    const Turn& t = dialog.turns[i];
    if (form == ContextForm::kLexical) {
      context.push_back(t.user);
      context.push_back(t.response);
    } else {
      context.push_back(t.user_delex);
      context.push_back(t.response_delex);
    }
  }
  return context;
}

FilterDecision compare_prediction(const Prediction& predicted, const Turn& gold) {
  // DialogState is a map of maps, so equality is already order-insensitive
  // set-of-triples equality.
  if (predicted.state != gold.state) return {false, FilterReason::kStateMismatch};
  auto a = predicted.acts;
  auto b = gold.acts;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) return {false, FilterReason::kActMismatch};
  return {true, FilterReason::kAccepted};
}

FilterDecision ConsistencyFilter::check(std::span<const std::string> context,
                                        const Turn& gold,
                                        std::string_view candidate_delex) const {
  std::string utterance(candidate_delex);
  if (form_ == ContextForm::kLexical) {
    utterance = relexicalize(candidate_delex, gold.delex_map.user);
  }
  return compare_prediction(predictor_->predict({context, utterance, gold}), gold);
}

FilterDecision ConsistencyFilter::check(const Dialog& dialog, std::size_t turn_index,
                                        std::string_view candidate_delex) const {
  const auto context = dialog_context(dialog, turn_index, form_);
  return check(context, dialog.turns.at(turn_index), candidate_delex);
}

}  // namespace toddag
