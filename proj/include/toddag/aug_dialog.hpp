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

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "toddag/corpus.hpp"
#include "toddag/random.hpp"

namespace toddag {

// One turn of an original dialog with its delexicalized state context.
// `previous` is empty for a first turn (ROOT) and `next` for a last one
// (LEAF).
struct TurnTemplate {
  Turn turn;
  std::optional<DialogState> previous;
  DialogState current;
  std::optional<DialogState> next;
  std::string origin_dialog;
  std::size_t origin_turn = 0;

  bool is_first() const { return !previous.has_value(); }
  bool is_last() const { return !next.has_value(); }
};

// One template per turn, in input order; duplicates are kept.
std::vector<TurnTemplate> extract_templates(std::span<const Dialog> dialogs);

// parent -> child link: parent.next == child.current and
// child.previous == parent.current.
bool links(const TurnTemplate& parent, const TurnTemplate& child);

// Templates linked under a synthetic root. Node ids index templates();
// kRoot names the root.
class TemplateTree {
 public:
  static constexpr std::size_t kRoot = std::numeric_limits<std::size_t>::max();

  explicit TemplateTree(std::vector<TurnTemplate> templates);

  const std::vector<TurnTemplate>& templates() const { return templates_; }
  // Children ordered by (origin dialog id, origin turn), ties in input order.
  const std::vector<std::size_t>& children(std::size_t node) const;

  // Every root-to-LEAF path of at most max_turns templates. Repeated states
  // can make the graph cyclic, hence the bound.
  std::vector<std::vector<std::size_t>> enumerate_paths(std::size_t max_turns) const;

  // Walks from the root picking children uniformly until a LEAF template.
  // nullopt when the walk exceeds max_turns.
  std::optional<std::vector<std::size_t>> random_walk(Rng& rng, std::size_t max_turns) const;

 private:
  std::vector<TurnTemplate> templates_;
  std::vector<std::size_t> root_children_;
  std::vector<std::vector<std::size_t>> children_;
};

// Distinct surface values per placeholder token, sorted.
using ValuePool = std::map<std::string, std::vector<std::string>>;

// Values of every delex-map entry (user and system side) of the dialogs.
ValuePool collect_values(std::span<const Dialog> dialogs);

// Fills every placeholder of a delexicalized dialog with one value drawn
// from the pool, the same value for every occurrence of that placeholder in
// the dialog. State slots whose placeholder was filled take that value.
// Throws CorpusError naming the slot when its pool is empty.
Dialog surface_realize(const Dialog& delex_dialog, const ValuePool& pool, Rng& rng);

struct SynthesisOptions {
  std::size_t sample_size = 50;
  std::size_t walk_attempts = 100;
};

// Samples dialogs with replacement from `pool`, links their templates and
// random-walks one synthetic dialog, then realizes it with values of the
// sampled dialogs. The result has no id and split kTrain. When every walk
// attempt exceeds the longest sampled dialog, a sampled original chain is
// used instead.
Dialog synthesize_dialog(std::span<const Dialog> pool, const SynthesisOptions& options,
                         Rng& rng);

struct StateIndexEntry {
  std::vector<SystemAct> acts;
  std::string response;
  std::string response_delex;
  DelexMap response_map;
  DialogState state;  // delexicalized state of the origin turn
  std::string origin_dialog;
  std::size_t origin_turn = 0;
};

// (acts, response) pairs grouped by delexicalized state, in corpus order.
class StateIndex {
 public:
  StateIndex() = default;
  explicit StateIndex(std::span<const Dialog> dialogs);

  const std::vector<StateIndexEntry>* find(const DialogState& delex_state) const;
  std::size_t keys() const { return index_.size(); }
  const std::map<DialogState, std::vector<StateIndexEntry>>& entries() const { return index_; }

 private:
  std::map<DialogState, std::vector<StateIndexEntry>> index_;
};

// Replaces each turn's acts and response with a pair drawn uniformly from
// the index entry for the turn's delexicalized state. Turns whose state is
// not indexed are kept. User side and states never change.
Dialog act_response_substitute(const Dialog& dialog, const StateIndex& index, Rng& rng);

}  // namespace toddag
