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

#include "toddag/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "toddag/delex.hpp"
#include "toddag/text.hpp"

namespace toddag {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string msg = std::to_string(issues.size()) + " ingest issue(s):";
  const std::size_t shown = std::min<std::size_t>(issues.size(), 50);
  for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + issues[i];
  if (shown < issues.size()) msg += "\n  ...";
  return msg;
}

// Lowercase; anything outside [a-z0-9_] becomes '_'.
std::string canonical_slot(std::string_view raw) {
  std::string slot = to_lower(raw);
  for (char& c : slot) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) c = '_';
  }
  return slot;
}

// Values that are annotation markers rather than surface text.
bool is_marker_value(std::string_view value) {
  static const std::set<std::string, std::less<>> kMarkers = {
      "", "not mentioned", "none", "dontcare", "dont care", "don't care",
      "?", "yes", "no", "free"};
  return kMarkers.contains(to_lower(value));
}

json load_json(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw IngestError({path.filename().string() + ": " + e.what()});
  }
}

std::set<std::string> load_id_list(const std::filesystem::path& path) {
  std::set<std::string> ids;
  if (!std::filesystem::exists(path)) return ids;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (line.ends_with(".json")) line.resize(line.size() - 5);
    ids.insert(to_lower(line));
  }
  return ids;
}

void add_to_ontology(Corpus& corpus, const DialogState& state) {
  for (const auto& [domain, slots] : state.slots) {
    for (const auto& [slot, value] : slots) corpus.ontology.emplace(domain, slot);
  }
}

// MultiWOZ act slot abbreviations mapped onto state slot names.
std::string multiwoz_act_slot(std::string_view raw) {
  static const std::map<std::string, std::string, std::less<>> kNames = {
      {"addr", "address"},     {"post", "postcode"},   {"ref", "reference"},
      {"price", "pricerange"}, {"leave", "leaveat"},   {"arrive", "arriveby"},
      {"dest", "destination"}, {"depart", "departure"}, {"none", ""}};
  const std::string slot = canonical_slot(raw);
  auto it = kNames.find(slot);
  return it == kNames.end() ? slot : it->second;
}

}  // namespace

IngestError::IngestError(std::vector<std::string> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

DelexMap find_values(const std::string& text,
                     const std::vector<std::pair<std::string, std::string>>& candidates) {
  std::vector<std::pair<std::string, std::string>> sorted;
  for (const auto& [slot, value] : candidates) {
    if (is_marker_value(value)) continue;
    const std::string needle = normalize_text(value);
    if (needle.empty()) continue;
    sorted.emplace_back(canonical_slot(slot), needle);
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
    return a < b;
  });
  DelexMap map;
  const auto overlaps = [&](std::size_t begin, std::size_t end) {
    return std::any_of(map.begin(), map.end(), [&](const DelexEntry& e) {
      return begin < e.end && e.begin < end;
    });
  };
  for (const auto& [slot, needle] : sorted) {
    for (std::size_t pos : find_token_aligned(text, needle)) {
      const std::size_t end = pos + needle.size();
      if (overlaps(pos, end)) continue;
      map.push_back({placeholder_for(slot), text.substr(pos, needle.size()), pos, end});
    }
  }
  std::sort(map.begin(), map.end(),
            [](const DelexEntry& a, const DelexEntry& b) { return a.begin < b.begin; });
  return map;
}

// ---------------------------------------------------------------------------
// MultiWOZ 2.0

namespace {

const std::set<std::string> kMultiwozDomains = {
    "taxi", "police", "restaurant", "hospital", "hotel", "attraction", "train", "bus"};
// Domains whose goals carry venue constraints checked by Inform.
const std::set<std::string> kVenueDomains = {"restaurant", "hotel", "attraction", "train"};

DialogState read_metadata(const json& metadata, const std::string& where,
                          std::vector<std::string>& issues) {
  DialogState state;
  if (!metadata.is_object()) {
    issues.push_back(where + ": metadata is not an object");
    return state;
  }
  for (const auto& [domain_raw, sections] : metadata.items()) {
    const std::string domain = to_lower(domain_raw);
    if (!kMultiwozDomains.contains(domain)) {
      issues.push_back(where + ": unmapped metadata domain '" + domain_raw + "'");
      continue;
    }
    for (const auto& [section, slots] : sections.items()) {
      if (section != "semi" && section != "book") {
        issues.push_back(where + ": unmapped metadata field '" + domain_raw + "." +
                         section + "'");
        continue;
      }
      for (const auto& [slot_raw, value] : slots.items()) {
        if (section == "book" && slot_raw == "booked") continue;
        if (!value.is_string()) {
          issues.push_back(where + ": unmapped metadata field '" + domain_raw + "." +
                           section + "." + slot_raw + "' (non-string value)");
          continue;
        }
        const std::string v = value.get<std::string>();
        const std::string lv = to_lower(v);
        if (lv.empty() || lv == "not mentioned" || lv == "none") continue;
        state.slots[domain][canonical_slot(slot_raw)] = v;
      }
    }
  }
  std::erase_if(state.slots, [](const auto& kv) { return kv.second.empty(); });
  return state;
}

struct RawActs {
  std::vector<SystemAct> acts;
  std::vector<std::pair<std::string, std::string>> values;
};

RawActs read_acts(const json& turn_acts, const std::string& where,
                  std::vector<std::string>& issues) {
  RawActs out;
  if (turn_acts.is_string()) return out;  // "No Annotation"
  if (!turn_acts.is_object()) {
    issues.push_back(where + ": dialog act entry is not an object");
    return out;
  }
  for (const auto& [name, pairs] : turn_acts.items()) {
    const auto dash = name.find('-');
    if (dash == std::string::npos) {
      issues.push_back(where + ": unmapped dialog act '" + name + "'");
      continue;
    }
    const std::string domain = to_lower(name.substr(0, dash));
    const std::string act = to_lower(name.substr(dash + 1));
    if (!pairs.is_array()) {
      issues.push_back(where + ": dialog act '" + name + "' has no slot list");
      continue;
    }
    for (const auto& pair : pairs) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string()) {
        issues.push_back(where + ": malformed slot pair in '" + name + "'");
        continue;
      }
      SystemAct a{act, domain, multiwoz_act_slot(pair[0].get<std::string>())};
      if (pair[1].is_string() && !a.slot.empty()) {
        out.values.emplace_back(a.slot, pair[1].get<std::string>());
      }
      out.acts.push_back(std::move(a));
    }
  }
  return out;
}

GoalSpec read_multiwoz_goal(const json& goal, const std::string& where,
                            std::vector<std::string>& issues) {
  static const std::set<std::string> kGoalSections = {
      "info", "fail_info", "book", "fail_book", "reqt", "invalid", "pre_invalid"};
  GoalSpec spec;
  if (!goal.is_object()) {
    issues.push_back(where + ": goal is not an object");
    return spec;
  }
  for (const auto& [key, body] : goal.items()) {
    if (key == "topic" || key == "message") continue;
    if (!kMultiwozDomains.contains(key)) {
      issues.push_back(where + ": unmapped goal field '" + key + "'");
      continue;
    }
    if (!body.is_object() || body.empty()) continue;
    DomainGoal dg;
    for (const auto& [section, content] : body.items()) {
      if (!kGoalSections.contains(section)) {
        issues.push_back(where + ": unmapped goal field '" + key + "." + section + "'");
        continue;
      }
      if (section == "info" && kVenueDomains.contains(key) && content.is_object()) {
        for (const auto& [slot, value] : content.items()) {
          if (value.is_string()) dg.informable[canonical_slot(slot)] = value.get<std::string>();
        }
      }
      if (section == "reqt" && content.is_array()) {
        for (const auto& slot : content) {
          if (slot.is_string()) dg.requestable.insert(multiwoz_act_slot(slot.get<std::string>()));
        }
      }
    }
    spec.domains.emplace(key, std::move(dg));
  }
  return spec;
}

}  // namespace

Corpus ingest_multiwoz(const std::filesystem::path& raw_dir) {
  const auto data_path = raw_dir / "data.json";
  if (!std::filesystem::exists(data_path)) {
    throw IngestError({raw_dir.string() + ": missing dialog/goal file data.json"});
  }
  const json data = load_json(data_path);
  json acts_by_dialog = json::object();
  if (std::filesystem::exists(raw_dir / "dialogue_acts.json")) {
    acts_by_dialog = load_json(raw_dir / "dialogue_acts.json");
  }
  const auto val_ids = load_id_list(raw_dir / "valListFile.txt");
  const auto test_ids = load_id_list(raw_dir / "testListFile.txt");
  if (!data.is_object()) throw IngestError({"data.json: expected an object of dialogs"});

  static const std::set<std::string> kLogFields = {"text", "metadata", "dialog_act",
                                                   "span_info"};
  std::vector<std::string> issues;
  Corpus corpus;
  corpus.dataset_id = "multiwoz-2.0";
  for (const auto& [raw_id, body] : data.items()) {
    std::string id = raw_id;
    if (id.ends_with(".json")) id.resize(id.size() - 5);
    id = to_lower(id);
    const std::string where = "dialog '" + id + "'";
    if (!body.is_object() || !body.contains("log")) {
      issues.push_back(where + ": missing log");
      continue;
    }
    if (!body.contains("goal")) {
      issues.push_back(where + ": missing goal");
      continue;
    }
    const json& log = body["log"];
    if (!log.is_array() || log.size() % 2 != 0) {
      issues.push_back(where + ": log must alternate user/system entries (odd length)");
      continue;
    }
    const std::size_t before = issues.size();
    GoalSpec goal = read_multiwoz_goal(body["goal"], where, issues);
    const json* dialog_acts = nullptr;
    for (const auto& key : {raw_id, id, raw_id.substr(0, raw_id.find(".json"))}) {
      if (acts_by_dialog.contains(key)) {
        dialog_acts = &acts_by_dialog[key];
        break;
      }
    }
    Dialog dialog;
    dialog.id = id;
    dialog.split = test_ids.contains(id)  ? Split::kTest
                   : val_ids.contains(id) ? Split::kValidation
                                          : Split::kTrain;
    for (std::size_t i = 0; i + 1 < log.size(); i += 2) {
      const std::size_t t = i / 2;
      const std::string tw = where + ", turn " + std::to_string(t);
      for (const json* entry : {&log[i], &log[i + 1]}) {
        for (const auto& [field, value] : entry->items()) {
          if (!kLogFields.contains(field)) {
            issues.push_back(tw + ": unmapped annotation field '" + field + "'");
          }
        }
      }
      if (!log[i].contains("text") || !log[i]["text"].is_string() ||
          !log[i + 1].contains("text") || !log[i + 1]["text"].is_string()) {
        issues.push_back(tw + ": missing utterance text");
        continue;
      }
      Turn turn;
      turn.index = t;
      turn.user = normalize_text(log[i]["text"].get<std::string>());
      turn.response = normalize_text(log[i + 1]["text"].get<std::string>());
      turn.state = read_metadata(log[i + 1].value("metadata", json::object()), tw, issues);
      RawActs acts;
      if (dialog_acts != nullptr) {
        const std::string key = std::to_string(t + 1);
        if (dialog_acts->contains(key)) acts = read_acts((*dialog_acts)[key], tw, issues);
      }
      turn.acts = acts.acts;
      std::vector<std::pair<std::string, std::string>> state_values;
      for (const auto& [domain, slots] : turn.state.slots) {
        for (const auto& [slot, value] : slots) state_values.emplace_back(slot, value);
      }
      auto response_values = acts.values;
      response_values.insert(response_values.end(), state_values.begin(), state_values.end());
      turn.delex_map.user = find_values(turn.user, state_values);
      turn.delex_map.response = find_values(turn.response, response_values);
      turn.user_delex = delexicalize(turn.user, turn.delex_map.user);
      turn.response_delex = delexicalize(turn.response, turn.delex_map.response);
      dialog.turns.push_back(std::move(turn));
    }
    if (issues.size() != before) continue;
    for (const auto& turn : dialog.turns) {
      add_to_ontology(corpus, turn.state);
      for (const auto& act : turn.acts) {
        corpus.act_vocabulary.insert(act.act);
        if (!act.slot.empty()) corpus.ontology.emplace(act.domain, act.slot);
      }
    }
    for (const auto& [domain, dg] : goal.domains) {
      for (const auto& [slot, value] : dg.informable) corpus.ontology.emplace(domain, slot);
      for (const auto& slot : dg.requestable) corpus.ontology.emplace(domain, slot);
    }
    dialog.domains = derive_domains(dialog, &goal);
    corpus.goals.emplace(id, std::move(goal));
    corpus.dialogs.push_back(std::move(dialog));
  }
  if (!issues.empty()) throw IngestError(std::move(issues));
  validate(corpus);
  return corpus;
}

// ---------------------------------------------------------------------------
// KVRET

Corpus ingest_kvret(const std::filesystem::path& raw_dir) {
  const std::vector<std::pair<std::string, Split>> files = {
      {"kvret_train_public.json", Split::kTrain},
      {"kvret_dev_public.json", Split::kValidation},
      {"kvret_test_public.json", Split::kTest}};
  std::vector<std::string> issues;
  Corpus corpus;
  corpus.dataset_id = "kvret";
  bool any = false;
  for (const auto& [name, split] : files) {
    const auto path = raw_dir / name;
    if (!std::filesystem::exists(path)) continue;
    any = true;
    const json dialogs = load_json(path);
    if (!dialogs.is_array()) {
      issues.push_back(name + ": expected an array of dialogs");
      continue;
    }
    const std::string prefix(split_name(split));
    for (std::size_t d = 0; d < dialogs.size(); ++d) {
      char buffer[16];
      std::snprintf(buffer, sizeof buffer, "%04zu", d);
      const std::string id = prefix + "_" + buffer;
      const std::string where = "dialog '" + id + "'";
      const json& body = dialogs[d];
      const json* intent = nullptr;
      if (body.contains("scenario") && body["scenario"].contains("task")) {
        intent = &body["scenario"]["task"]["intent"];
      }
      if (intent == nullptr || !intent->is_string()) {
        issues.push_back(where + ": missing scenario.task.intent");
        continue;
      }
      const std::string domain = to_lower(intent->get<std::string>());
      if (!body.contains("dialogue") || !body["dialogue"].is_array()) {
        issues.push_back(where + ": missing dialogue");
        continue;
      }
      // Requested KB columns, for delexicalizing KB values in responses.
      std::vector<std::pair<std::string, std::string>> kb_values;
      if (body["scenario"].contains("kb") && body["scenario"]["kb"].contains("items") &&
          body["scenario"]["kb"]["items"].is_array()) {
        for (const auto& item : body["scenario"]["kb"]["items"]) {
          if (!item.is_object()) continue;
          for (const auto& [column, value] : item.items()) {
            if (value.is_string()) kb_values.emplace_back(column, value.get<std::string>());
          }
        }
      }
      Dialog dialog;
      dialog.id = id;
      dialog.split = split;
      GoalSpec goal;
      DomainGoal& dg = goal.domains[domain];
      SlotValues accumulated;
      const std::size_t before = issues.size();
      const json& turns = body["dialogue"];
      std::size_t i = 0;
      while (i < turns.size()) {
        std::string user, response;
        const json* assistant = nullptr;
        const auto speaker = [&](std::size_t k) { return turns[k].value("turn", std::string()); };
        const auto utterance = [&](std::size_t k) -> std::string {
          const json& data = turns[k].value("data", json::object());
          if (!data.contains("utterance") || !data["utterance"].is_string()) {
            issues.push_back(where + ": entry " + std::to_string(k) + " has no utterance");
            return {};
          }
          return data["utterance"].get<std::string>();
        };
        const std::string s = speaker(i);
        if (s != "driver" && s != "assistant") {
          issues.push_back(where + ": unmapped speaker '" + s + "'");
          ++i;
          continue;
        }
        if (s == "driver") {
          user = utterance(i);
          ++i;
          if (i < turns.size() && speaker(i) == "assistant") {
            assistant = &turns[i];
            response = utterance(i);
            ++i;
          }
        } else {
          assistant = &turns[i];
          response = utterance(i);
          ++i;
        }
        Turn turn;
        turn.index = dialog.turns.size();
        turn.user = normalize_text(user);
        turn.response = normalize_text(response);
        if (assistant != nullptr) {
          const json& data = (*assistant)["data"];
          for (const auto& [field, value] : data.items()) {
            if (field != "end_dialogue" && field != "utterance" && field != "requested" &&
                field != "slots") {
              issues.push_back(where + ": unmapped annotation field '" + field + "'");
            }
          }
          if (data.contains("slots") && data["slots"].is_object()) {
            for (const auto& [slot, value] : data["slots"].items()) {
              if (value.is_string() && !value.get<std::string>().empty()) {
                accumulated[canonical_slot(slot)] = value.get<std::string>();
              }
            }
          }
          if (data.contains("requested") && data["requested"].is_object()) {
            for (const auto& [slot, flag] : data["requested"].items()) {
              if (flag.is_boolean() && flag.get<bool>()) {
                dg.requestable.insert(canonical_slot(slot));
                turn.acts.push_back({"inform", domain, canonical_slot(slot)});
              }
            }
          }
        }
        if (!accumulated.empty()) turn.state.slots[domain] = accumulated;
        std::vector<std::pair<std::string, std::string>> values(accumulated.begin(),
                                                                accumulated.end());
        auto response_values = values;
        for (const auto& [column, value] : kb_values) {
          if (dg.requestable.contains(canonical_slot(column))) {
            response_values.emplace_back(column, value);
          }
        }
        turn.delex_map.user = find_values(turn.user, values);
        turn.delex_map.response = find_values(turn.response, response_values);
        turn.user_delex = delexicalize(turn.user, turn.delex_map.user);
        turn.response_delex = delexicalize(turn.response, turn.delex_map.response);
        dialog.turns.push_back(std::move(turn));
      }
      if (issues.size() != before) continue;
      dg.informable = accumulated;
      for (const auto& turn : dialog.turns) {
        add_to_ontology(corpus, turn.state);
        for (const auto& act : turn.acts) {
          corpus.act_vocabulary.insert(act.act);
          corpus.ontology.emplace(act.domain, act.slot);
        }
      }
      for (const auto& slot : dg.requestable) corpus.ontology.emplace(domain, slot);
      for (const auto& [slot, value] : dg.informable) corpus.ontology.emplace(domain, slot);
      dialog.domains = {domain};
      corpus.goals.emplace(id, std::move(goal));
      corpus.dialogs.push_back(std::move(dialog));
    }
  }
  if (!any) {
    throw IngestError({raw_dir.string() + ": no kvret_{train,dev,test}_public.json files"});
  }
  if (!issues.empty()) throw IngestError(std::move(issues));
  validate(corpus);
  return corpus;
}

}  // namespace toddag
