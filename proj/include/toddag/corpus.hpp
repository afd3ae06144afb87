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

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toddag/error.hpp"

namespace toddag {

// One delexicalized span: `placeholder` replaced `value`, which occupies
// [begin, end) of the lexical utterance.
struct DelexEntry {
  std::string placeholder;
  std::string value;
  std::size_t begin = 0;
  std::size_t end = 0;

  auto operator<=>(const DelexEntry&) const = default;
};

// Entries sorted by `begin`, spans non-overlapping.
using DelexMap = std::vector<DelexEntry>;

struct TurnDelexMaps {
  DelexMap user;
  DelexMap response;

  auto operator<=>(const TurnDelexMaps&) const = default;
};

using SlotValues = std::map<std::string, std::string>;

// domain -> slot -> value.
struct DialogState {
  std::map<std::string, SlotValues> slots;

  bool empty() const;
  std::size_t size() const;  // number of (domain, slot, value) triples
  auto operator<=>(const DialogState&) const = default;
};

// Values replaced by their slot placeholders; structure kept.
DialogState delexicalize_state(const DialogState& state);

struct SystemAct {
  std::string act;
  std::string domain;
  std::string slot;  // empty when the act carries no slot

  auto operator<=>(const SystemAct&) const = default;
};

struct Turn {
  std::size_t index = 0;
  std::string user;
  std::string user_delex;
  std::string response;
  std::string response_delex;
  DialogState state;
  std::vector<SystemAct> acts;
  TurnDelexMaps delex_map;

  auto operator<=>(const Turn&) const = default;
};

enum class Split { kTrain, kValidation, kTest };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);

struct Dialog {
  std::string id;
  Split split = Split::kTrain;
  std::vector<std::string> domains;
  std::vector<Turn> turns;

  auto operator<=>(const Dialog&) const = default;
};

struct DomainGoal {
  SlotValues informable;
  std::set<std::string> requestable;

  auto operator<=>(const DomainGoal&) const = default;
};

struct GoalSpec {
  std::map<std::string, DomainGoal> domains;

  auto operator<=>(const GoalSpec&) const = default;
};

using Ontology = std::set<std::pair<std::string, std::string>>;

struct Corpus {
  std::string dataset_id;
  Ontology ontology;
  std::set<std::string> act_vocabulary;
  std::vector<Dialog> dialogs;
  std::map<std::string, GoalSpec> goals;

  std::size_t count(Split split) const;
  const Dialog* find(std::string_view dialog_id) const;
  const GoalSpec* goal(std::string_view dialog_id) const;
};

// Malformed canonical JSON. `locus` is "line L, column C" for syntax errors
// or a JSON path such as "dialogs[3].turns[1].state" for field errors.
class ParseError : public Error {
 public:
  ParseError(std::string locus, const std::string& message)
      : Error(locus + ": " + message), locus_(std::move(locus)) {}
  const std::string& locus() const { return locus_; }

 private:
  std::string locus_;
};

// A corpus invariant does not hold. turn_index is empty for dialog- or
// corpus-level violations.
class CorpusError : public Error {
 public:
  CorpusError(std::string dialog_id, std::optional<std::size_t> turn_index,
              const std::string& message);
  const std::string& dialog_id() const { return dialog_id_; }
  std::optional<std::size_t> turn_index() const { return turn_index_; }

 private:
  std::string dialog_id_;
  std::optional<std::size_t> turn_index_;
};

// Domains in first-appearance order over the turn states. A dialog whose
// states are all empty takes the (sorted) domains of its goal instead.
std::vector<std::string> derive_domains(const Dialog& dialog,
                                        const GoalSpec* goal);

// Throws CorpusError on the first violated invariant.
void validate(const Corpus& corpus);
void validate_dialog(const Dialog& dialog, const Corpus& corpus);

Corpus parse_canonical(std::string_view json_text);
Corpus load_canonical(const std::filesystem::path& path);

// Deterministic serialization: equal corpora produce identical bytes.
std::string to_canonical_json(const Corpus& corpus);
void save_canonical(const Corpus& corpus, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace toddag
