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

#include "toddag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "toddag/delex.hpp"
#include "toddag/text.hpp"

namespace toddag {

using nlohmann::json;
using nlohmann::ordered_json;

bool DialogState::empty() const { return size() == 0; }

std::size_t DialogState::size() const {
  std::size_t n = 0;
  for (const auto& [domain, slots] : this->slots) n += slots.size();
  return n;
}

DialogState delexicalize_state(const DialogState& state) {
  DialogState out;
  for (const auto& [domain, slots] : state.slots) {
    auto& target = out.slots[domain];
    for (const auto& [slot, value] : slots) target[slot] = placeholder_for(slot);
  }
  return out;
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw Error("unknown split '" + std::string(name) + "'");
}

std::size_t Corpus::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(dialogs.begin(), dialogs.end(),
                    [split](const Dialog& d) { return d.split == split; }));
}

const Dialog* Corpus::find(std::string_view dialog_id) const {
  for (const auto& d : dialogs) {
    if (d.id == dialog_id) return &d;
  }
  return nullptr;
}

const GoalSpec* Corpus::goal(std::string_view dialog_id) const {
  auto it = goals.find(std::string(dialog_id));
  return it == goals.end() ? nullptr : &it->second;
}

CorpusError::CorpusError(std::string dialog_id,
                         std::optional<std::size_t> turn_index,
                         const std::string& message)
    : Error("dialog '" + dialog_id + "'" +
            (turn_index ? ", turn " + std::to_string(*turn_index) : "") +
            ": " + message),
      dialog_id_(std::move(dialog_id)),
      turn_index_(turn_index) {}

std::vector<std::string> derive_domains(const Dialog& dialog,
                                        const GoalSpec* goal) {
  std::vector<std::string> domains;
  for (const auto& turn : dialog.turns) {
    for (const auto& [domain, slots] : turn.state.slots) {
      if (!slots.empty() &&
          std::find(domains.begin(), domains.end(), domain) == domains.end()) {
        domains.push_back(domain);
      }
    }
  }
  if (domains.empty() && goal != nullptr) {
    for (const auto& [domain, g] : goal->domains) domains.push_back(domain);
  }
  return domains;
}

void validate_dialog(const Dialog& dialog, const Corpus& corpus) {
  const auto fail = [&](std::optional<std::size_t> turn,
                        const std::string& message) {
    throw CorpusError(dialog.id, turn, message);
  };
  if (dialog.id.empty()) fail(std::nullopt, "empty dialog id");
  for (std::size_t i = 0; i < dialog.turns.size(); ++i) {
    const Turn& turn = dialog.turns[i];
    if (turn.index != i) {
      fail(i, "turn index " + std::to_string(turn.index) +
                  " breaks the contiguous 0..n-1 sequence");
    }
    for (const auto& [domain, slots] : turn.state.slots) {
      for (const auto& [slot, value] : slots) {
        if (value.empty()) fail(i, "empty value for " + domain + "-" + slot);
        if (!corpus.ontology.contains({domain, slot})) {
          fail(i, "state slot " + domain + "-" + slot + " not in ontology");
        }
      }
    }
    for (const auto& act : turn.acts) {
      if (!corpus.act_vocabulary.contains(act.act)) {
        fail(i, "act '" + act.act + "' not in the act vocabulary");
      }
      if (!act.slot.empty() && !corpus.ontology.contains({act.domain, act.slot})) {
        fail(i, "act slot " + act.domain + "-" + act.slot + " not in ontology");
      }
    }
    const auto check_side = [&](const std::string& lexical,
                                const std::string& delex, const DelexMap& map,
                                const char* side) {
      try {
        check_delex_map(lexical, map);
        if (relexicalize(delex, map) != lexical) {
          fail(i, std::string(side) +
                      " relexicalization does not reproduce the lexical text");
        }
      } catch (const DelexError& e) {
        fail(i, std::string(side) + ": " + e.what());
      }
    };
    check_side(turn.user, turn.user_delex, turn.delex_map.user, "user");
    check_side(turn.response, turn.response_delex, turn.delex_map.response,
               "response");
  }
  const auto expected = derive_domains(dialog, corpus.goal(dialog.id));
  if (expected != dialog.domains) {
    std::string got, want;
    for (const auto& d : dialog.domains) got += d + " ";
    for (const auto& d : expected) want += d + " ";
    fail(std::nullopt, "domains [" + got + "] differ from first-appearance order [" +
                           want + "]");
  }
}

void validate(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& dialog : corpus.dialogs) {
    if (!ids.insert(dialog.id).second) {
      throw CorpusError(dialog.id, std::nullopt, "duplicate dialog id");
    }
    validate_dialog(dialog, corpus);
  }
  for (const auto& [id, goal] : corpus.goals) {
    for (const auto& [domain, g] : goal.domains) {
      for (const auto& [slot, value] : g.informable) {
        if (!corpus.ontology.contains({domain, slot})) {
          throw CorpusError(id, std::nullopt,
                            "goal slot " + domain + "-" + slot + " not in ontology");
        }
      }
      for (const auto& slot : g.requestable) {
        if (!corpus.ontology.contains({domain, slot})) {
          throw CorpusError(id, std::nullopt,
                            "goal slot " + domain + "-" + slot + " not in ontology");
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Canonical JSON reading.

namespace {

class Reader {
 public:
  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw ParseError(path, msg);
  }

  static const json& field(const json& obj, const std::string& key,
                           const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing field '" + key + "'");
    return *it;
  }

  static std::string string_at(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  static std::size_t size_at(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail(path, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  static const json& array_at(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
  }

  static const json& object_at(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    return v;
  }
};

DelexMap read_delex_map(const json& v, const std::string& path) {
  DelexMap map;
  const auto& arr = Reader::array_at(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    DelexEntry e;
    e.placeholder = Reader::string_at(Reader::field(arr[i], "placeholder", p), p + ".placeholder");
    e.value = Reader::string_at(Reader::field(arr[i], "value", p), p + ".value");
    const auto& span = Reader::array_at(Reader::field(arr[i], "span", p), p + ".span");
    if (span.size() != 2) Reader::fail(p + ".span", "expected [begin, end]");
    e.begin = Reader::size_at(span[0], p + ".span[0]");
    e.end = Reader::size_at(span[1], p + ".span[1]");
    map.push_back(std::move(e));
  }
  return map;
}

DialogState read_state(const json& v, const std::string& path) {
  DialogState state;
  for (const auto& [domain, slots] : Reader::object_at(v, path).items()) {
    const std::string dp = path + "." + domain;
    auto& target = state.slots[domain];
    for (const auto& [slot, value] : Reader::object_at(slots, dp).items()) {
      target[slot] = Reader::string_at(value, dp + "." + slot);
    }
  }
  return state;
}

SystemAct read_act(const json& v, const std::string& path) {
  SystemAct act;
  act.act = Reader::string_at(Reader::field(v, "act", path), path + ".act");
  act.domain = Reader::string_at(Reader::field(v, "domain", path), path + ".domain");
  if (auto it = v.find("slot"); it != v.end()) {
    act.slot = Reader::string_at(*it, path + ".slot");
  }
  return act;
}

Turn read_turn(const json& v, const std::string& path) {
  Turn t;
  t.index = Reader::size_at(Reader::field(v, "index", path), path + ".index");
  t.user = Reader::string_at(Reader::field(v, "user", path), path + ".user");
  t.user_delex = Reader::string_at(Reader::field(v, "user_delex", path), path + ".user_delex");
  t.response = Reader::string_at(Reader::field(v, "response", path), path + ".response");
  t.response_delex =
      Reader::string_at(Reader::field(v, "response_delex", path), path + ".response_delex");
  t.state = read_state(Reader::field(v, "state", path), path + ".state");
  const auto& acts = Reader::array_at(Reader::field(v, "acts", path), path + ".acts");
  for (std::size_t i = 0; i < acts.size(); ++i) {
    t.acts.push_back(read_act(acts[i], path + ".acts[" + std::to_string(i) + "]"));
  }
  const auto& dm = Reader::field(v, "delex_map", path);
  t.delex_map.user = read_delex_map(Reader::field(dm, "user", path + ".delex_map"),
                                    path + ".delex_map.user");
  t.delex_map.response = read_delex_map(Reader::field(dm, "response", path + ".delex_map"),
                                        path + ".delex_map.response");
  return t;
}

GoalSpec read_goal(const json& v, const std::string& path) {
  GoalSpec goal;
  for (const auto& [domain, g] : Reader::object_at(v, path).items()) {
    const std::string dp = path + "." + domain;
    DomainGoal dg;
    if (auto it = g.find("informable"); it != g.end()) {
      for (const auto& [slot, value] : Reader::object_at(*it, dp + ".informable").items()) {
        dg.informable[slot] = Reader::string_at(value, dp + ".informable." + slot);
      }
    }
    if (auto it = g.find("requestable"); it != g.end()) {
      const auto& arr = Reader::array_at(*it, dp + ".requestable");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        dg.requestable.insert(
            Reader::string_at(arr[i], dp + ".requestable[" + std::to_string(i) + "]"));
      }
    }
    goal.domains.emplace(domain, std::move(dg));
  }
  return goal;
}

std::string line_locus(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

Corpus parse_canonical(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_locus(json_text, e.byte), e.what());
  }
  Corpus corpus;
  corpus.dataset_id = Reader::string_at(Reader::field(root, "dataset_id", "$"), "dataset_id");
  for (const auto& [domain, slots] :
       Reader::object_at(Reader::field(root, "ontology", "$"), "ontology").items()) {
    const auto& arr = Reader::array_at(slots, "ontology." + domain);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      corpus.ontology.emplace(
          domain, Reader::string_at(arr[i], "ontology." + domain + "[" + std::to_string(i) + "]"));
    }
  }
  if (auto it = root.find("act_vocabulary"); it != root.end()) {
    const auto& arr = Reader::array_at(*it, "act_vocabulary");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      corpus.act_vocabulary.insert(
          Reader::string_at(arr[i], "act_vocabulary[" + std::to_string(i) + "]"));
    }
  }
  const auto& dialogs = Reader::array_at(Reader::field(root, "dialogs", "$"), "dialogs");
  for (std::size_t d = 0; d < dialogs.size(); ++d) {
    const std::string p = "dialogs[" + std::to_string(d) + "]";
    Dialog dialog;
    dialog.id = Reader::string_at(Reader::field(dialogs[d], "id", p), p + ".id");
    if (auto it = dialogs[d].find("split"); it != dialogs[d].end()) {
      try {
        dialog.split = parse_split(Reader::string_at(*it, p + ".split"));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(p + ".split", e.what());
      }
    }
    const auto& domains = Reader::array_at(Reader::field(dialogs[d], "domains", p), p + ".domains");
    for (std::size_t i = 0; i < domains.size(); ++i) {
      dialog.domains.push_back(
          Reader::string_at(domains[i], p + ".domains[" + std::to_string(i) + "]"));
    }
    const auto& turns = Reader::array_at(Reader::field(dialogs[d], "turns", p), p + ".turns");
    for (std::size_t i = 0; i < turns.size(); ++i) {
      dialog.turns.push_back(read_turn(turns[i], p + ".turns[" + std::to_string(i) + "]"));
    }
    corpus.dialogs.push_back(std::move(dialog));
  }
  if (auto it = root.find("goals"); it != root.end()) {
    for (const auto& [id, goal] : Reader::object_at(*it, "goals").items()) {
      corpus.goals.emplace(id, read_goal(goal, "goals." + id));
    }
  }
  validate(corpus);
  return corpus;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Corpus load_canonical(const std::filesystem::path& path) {
  return parse_canonical(read_file(path));
}

// ---------------------------------------------------------------------------
// Canonical JSON writing.

namespace {

ordered_json write_delex_map(const DelexMap& map) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : map) {
    ordered_json entry;
    entry["placeholder"] = e.placeholder;
    entry["value"] = e.value;
    entry["span"] = {e.begin, e.end};
    arr.push_back(std::move(entry));
  }
  return arr;
}

ordered_json write_state(const DialogState& state) {
  ordered_json obj = ordered_json::object();
  for (const auto& [domain, slots] : state.slots) {
    ordered_json s = ordered_json::object();
    for (const auto& [slot, value] : slots) s[slot] = value;
    obj[domain] = std::move(s);
  }
  return obj;
}

ordered_json write_turn(const Turn& t) {
  ordered_json obj;
  obj["index"] = t.index;
  obj["user"] = t.user;
  obj["user_delex"] = t.user_delex;
  obj["response"] = t.response;
  obj["response_delex"] = t.response_delex;
  obj["state"] = write_state(t.state);
  ordered_json acts = ordered_json::array();
  for (const auto& a : t.acts) {
    ordered_json act;
    act["act"] = a.act;
    act["domain"] = a.domain;
    act["slot"] = a.slot;
    acts.push_back(std::move(act));
  }
  obj["acts"] = std::move(acts);
  ordered_json dm;
  dm["user"] = write_delex_map(t.delex_map.user);
  dm["response"] = write_delex_map(t.delex_map.response);
  obj["delex_map"] = std::move(dm);
  return obj;
}

}  // namespace

std::string to_canonical_json(const Corpus& corpus) {
  ordered_json root;
  root["dataset_id"] = corpus.dataset_id;
  ordered_json ontology = ordered_json::object();
  for (const auto& [domain, slot] : corpus.ontology) ontology[domain].push_back(slot);
  root["ontology"] = std::move(ontology);
  root["act_vocabulary"] = ordered_json::array();
  for (const auto& act : corpus.act_vocabulary) root["act_vocabulary"].push_back(act);
  ordered_json dialogs = ordered_json::array();
  for (const auto& d : corpus.dialogs) {
    ordered_json dialog;
    dialog["id"] = d.id;
    dialog["split"] = std::string(split_name(d.split));
    dialog["domains"] = d.domains;
    ordered_json turns = ordered_json::array();
    for (const auto& t : d.turns) turns.push_back(write_turn(t));
    dialog["turns"] = std::move(turns);
    dialogs.push_back(std::move(dialog));
  }
  root["dialogs"] = std::move(dialogs);
  ordered_json goals = ordered_json::object();
  for (const auto& [id, goal] : corpus.goals) {
    ordered_json g = ordered_json::object();
    for (const auto& [domain, dg] : goal.domains) {
      ordered_json entry;
      ordered_json informable = ordered_json::object();
      for (const auto& [slot, value] : dg.informable) informable[slot] = value;
      entry["informable"] = std::move(informable);
      entry["requestable"] = ordered_json::array();
      for (const auto& slot : dg.requestable) entry["requestable"].push_back(slot);
      g[domain] = std::move(entry);
    }
    goals[id] = std::move(g);
  }
  root["goals"] = std::move(goals);
  return root.dump(1) + "\n";
}

void save_canonical(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, to_canonical_json(corpus));
}

}  // namespace toddag
