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

#include "toddag/aug_dialog.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "toddag/delex.hpp"
#include "toddag/text.hpp"

namespace toddag {

std::vector<TurnTemplate> extract_templates(std::span<const Dialog> dialogs) {
  std::vector<TurnTemplate> out;
  for (const Dialog& d : dialogs) {
    std::vector<DialogState> states;
    states.reserve(d.turns.size());
    for (const Turn& t : d.turns) states.push_back(delexicalize_state(t.state));
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
      TurnTemplate tmpl;
      tmpl.turn = d.turns[i];
      if (i > 0) tmpl.previous = states[i - 1];
      tmpl.current = states[i];
      if (i + 1 < d.turns.size()) tmpl.next = states[i + 1];
      tmpl.origin_dialog = d.id;
      tmpl.origin_turn = i;
      out.push_back(std::move(tmpl));
    }
  }
  return out;
}

bool links(const TurnTemplate& parent, const TurnTemplate& child) {
  return parent.next && child.previous && *parent.next == child.current &&
         *child.previous == parent.current;
}

TemplateTree::TemplateTree(std::vector<TurnTemplate> templates)
    : templates_(std::move(templates)), children_(templates_.size()) {
  std::vector<std::size_t> order(templates_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = templates_[a];
    const auto& y = templates_[b];
    if (x.origin_dialog != y.origin_dialog) return x.origin_dialog < y.origin_dialog;
    return x.origin_turn < y.origin_turn;
  });
  // Bucket candidate children by their current state so linking is not
  // quadratic on large samples.
  std::map<DialogState, std::vector<std::size_t>> by_current;
  for (std::size_t j : order) {
    if (templates_[j].is_first()) {
      root_children_.push_back(j);
    } else {
      by_current[templates_[j].current].push_back(j);
    }
  }
  for (std::size_t i = 0; i < templates_.size(); ++i) {
    const auto& parent = templates_[i];
    if (parent.is_last()) continue;
    auto bucket = by_current.find(*parent.next);
    if (bucket == by_current.end()) continue;
    for (std::size_t j : bucket->second) {
      if (links(parent, templates_[j])) children_[i].push_back(j);
    }
  }
}

const std::vector<std::size_t>& TemplateTree::children(std::size_t node) const {
  return node == kRoot ? root_children_ : children_.at(node);
}

std::vector<std::vector<std::size_t>> TemplateTree::enumerate_paths(std::size_t max_turns) const {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> path;
  auto visit = [&](auto&& self, std::size_t node) -> void {
    path.push_back(node);
    if (templates_[node].is_last()) {
      out.push_back(path);
    } else if (path.size() < max_turns) {
      for (std::size_t c : children_[node]) self(self, c);
    }
    path.pop_back();
  };
  if (max_turns > 0) {
    for (std::size_t c : root_children_) visit(visit, c);
  }
  return out;
}

std::optional<std::vector<std::size_t>> TemplateTree::random_walk(Rng& rng,
                                                                  std::size_t max_turns) const {
  std::vector<std::size_t> path;
  std::size_t node = kRoot;
  while (true) {
    const auto& next = children(node);
    if (next.empty()) return std::nullopt;  // only possible for an empty tree
    if (path.size() == max_turns) return std::nullopt;
    node = next[rng.uniform(next.size())];
    path.push_back(node);
    if (templates_[node].is_last()) return path;
  }
}

ValuePool collect_values(std::span<const Dialog> dialogs) {
  std::map<std::string, std::set<std::string>> sets;
  for (const Dialog& d : dialogs) {
    for (const Turn& t : d.turns) {
      for (const auto* map : {&t.delex_map.user, &t.delex_map.response}) {
        for (const auto& e : *map) sets[e.placeholder].insert(e.value);
      }
    }
  }
  ValuePool pool;
  for (auto& [placeholder, values] : sets) {
    pool[placeholder].assign(values.begin(), values.end());
  }
  return pool;
}

Dialog surface_realize(const Dialog& delex_dialog, const ValuePool& pool, Rng& rng) {
  Dialog out = delex_dialog;
  std::map<std::string, std::string> chosen;
  auto value_for = [&](const std::string& placeholder, std::size_t turn) -> const std::string& {
    auto it = chosen.find(placeholder);
    if (it != chosen.end()) return it->second;
    auto p = pool.find(placeholder);
    if (p == pool.end() || p->second.empty()) {
      const auto slot = placeholder_slot(placeholder);
      throw CorpusError(delex_dialog.id, turn,
                        "no value in pool for slot '" + slot.value_or(placeholder) + "'");
    }
    return chosen.emplace(placeholder, p->second[rng.uniform(p->second.size())]).first->second;
  };
  auto realize = [&](const std::string& delex, std::size_t turn) {
    DelexMap entries;
    for (const auto& placeholder : placeholders_in(delex)) {
      entries.push_back({placeholder, value_for(placeholder, turn), 0, 0});
    }
    return relexicalize_ordered(delex, entries);
  };
  for (Turn& t : out.turns) {
    Realized user = realize(t.user_delex, t.index);
    Realized response = realize(t.response_delex, t.index);
    t.user = std::move(user.text);
    t.delex_map.user = std::move(user.map);
    t.response = std::move(response.text);
    t.delex_map.response = std::move(response.map);
  }
  for (Turn& t : out.turns) {
    for (auto& [domain, slots] : t.state.slots) {
      for (auto& [slot, value] : slots) {
        if (auto it = chosen.find(placeholder_for(slot)); it != chosen.end()) value = it->second;
      }
    }
  }
  return out;
}

namespace {

Dialog assemble(const TemplateTree& tree, const std::vector<std::size_t>& path) {
  Dialog d;
  d.split = Split::kTrain;
  for (std::size_t node : path) {
    Turn t = tree.templates()[node].turn;
    t.index = d.turns.size();
    d.turns.push_back(std::move(t));
  }
  return d;
}

}  // namespace

Dialog synthesize_dialog(std::span<const Dialog> pool, const SynthesisOptions& options,
                         Rng& rng) {
  if (pool.empty()) throw Error("dialog synthesis needs a non-empty dialog pool");
  if (options.sample_size == 0) throw Error("dialog synthesis: sample size must be >= 1");
  std::vector<Dialog> sample;
  sample.reserve(options.sample_size);
  std::size_t longest = 0;
  for (std::size_t i = 0; i < options.sample_size; ++i) {
    sample.push_back(pool[rng.uniform(pool.size())]);
    longest = std::max(longest, sample.back().turns.size());
  }
  const TemplateTree tree(extract_templates(sample));

  std::optional<std::vector<std::size_t>> path;
  for (std::size_t attempt = 0; attempt < options.walk_attempts && !path; ++attempt) {
    path = tree.random_walk(rng, longest);
  }
  if (!path) {
    // Fall back to the template chain of one sampled original.
    const std::size_t pick = rng.uniform(sample.size());
    std::size_t first = 0;
    for (std::size_t i = 0; i < pick; ++i) first += sample[i].turns.size();
    path.emplace(sample[pick].turns.size());
    std::iota(path->begin(), path->end(), first);
  }
  Dialog delex = assemble(tree, *path);
  Dialog out = surface_realize(delex, collect_values(sample), rng);
  out.domains = derive_domains(out, nullptr);
  return out;
}

StateIndex::StateIndex(std::span<const Dialog> dialogs) {
  for (const Dialog& d : dialogs) {
    for (const Turn& t : d.turns) {
      DialogState key = delexicalize_state(t.state);
      index_[key].push_back({t.acts, t.response, t.response_delex, t.delex_map.response, key,
                             d.id, t.index});
    }
  }
}

const std::vector<StateIndexEntry>* StateIndex::find(const DialogState& delex_state) const {
  auto it = index_.find(delex_state);
  return it == index_.end() ? nullptr : &it->second;
}

Dialog act_response_substitute(const Dialog& dialog, const StateIndex& index, Rng& rng) {
  Dialog out = dialog;
  for (Turn& t : out.turns) {
    const auto* entries = index.find(delexicalize_state(t.state));
    if (entries == nullptr || entries->empty()) continue;
    const StateIndexEntry& e = (*entries)[rng.uniform(entries->size())];
    t.acts = e.acts;
    t.response = e.response;
    t.response_delex = e.response_delex;
    t.delex_map.response = e.response_map;
  }
  return out;
}

}  // namespace toddag
