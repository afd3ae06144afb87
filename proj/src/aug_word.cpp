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

#include "toddag/aug_word.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "toddag/delex.hpp"
#include "toddag/random.hpp"
#include "toddag/text.hpp"

namespace toddag {

void SubstitutionPolicy::validate() const {
  if (k < 1) throw Error("substitution policy: k must be >= 1");
  if (!(max_positions_fraction > 0.0 && max_positions_fraction <= 1.0)) {
    throw Error("substitution policy: max_positions_fraction must be in (0, 1]");
  }
}

bool EmbeddingCandidates::eligible(std::string_view token) const {
  return table_.contains(token);
}

std::vector<std::string> EmbeddingCandidates::candidates(const std::vector<std::string>& tokens,
                                                         std::size_t position, const DelexMap&,
                                                         std::size_t k) {
  std::vector<std::string> out;
  if (auto neighbors = table_.top_k_neighbors(tokens[position], k)) {
    for (auto& n : *neighbors) out.push_back(std::move(n.word));
  }
  return out;
}

bool MaskedLmCandidates::eligible(std::string_view token) const {
  return std::any_of(token.begin(), token.end(),
                     [](unsigned char c) { return std::isalnum(c) != 0; });
}

std::vector<std::string> MaskedLmCandidates::candidates(const std::vector<std::string>& tokens,
                                                        std::size_t position,
                                                        const DelexMap& map, std::size_t k) {
  auto masked = tokens;
  masked[position] = client_.endpoint().mask_token;
  const std::string lexical = relexicalize(join_tokens(masked), map);
  std::vector<std::string> out;
  std::set<std::string> seen;
  const std::string original = to_lower(tokens[position]);
  for (auto& c : client_.fill_mask(lexical, k)) {
    if (to_lower(c.token) == original) continue;
    if (seen.insert(c.token).second) out.push_back(std::move(c.token));
  }
  return out;
}

namespace {

bool usable_candidate(const std::string& candidate, const std::string& original) {
  if (candidate.empty() || is_placeholder(candidate)) return false;
  if (to_lower(candidate) == to_lower(original)) return false;
  const auto toks = tokenize(candidate);
  return toks.size() == 1 && toks[0] == candidate && !is_terminal_punctuation(candidate);
}

struct SideContext {
  Dialog& work;
  std::size_t turn;
  bool response;
};

bool accepted_by_filter(const SideContext& side, const std::string& candidate,
                        const ConsistencyFilter& filter) {
  if (!side.response) {
    return filter.check(side.work, side.turn, candidate).accepted;
  }
  const std::size_t next = side.turn + 1;
  auto context = dialog_context(side.work, next, filter.form());
  context[2 * side.turn + 1] =
      filter.form() == ContextForm::kLexical
          ? relexicalize(candidate, side.work.turns[side.turn].delex_map.response)
          : candidate;
  const Turn& gold = side.work.turns[next];
  return filter.check(context, gold, gold.user_delex).accepted;
}

void substitute_side(const SideContext& side, CandidateSource& source,
                     const StopwordList& stopwords, const SubstitutionPolicy& policy,
                     const ConsistencyFilter& filter, Rng& rng,
                     std::vector<SubstitutionRecord>& records) {
  Turn& turn = side.work.turns[side.turn];
  std::string& delex = side.response ? turn.response_delex : turn.user_delex;
  const DelexMap& map = side.response ? turn.delex_map.response : turn.delex_map.user;

  auto tokens = tokenize(delex);
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (is_placeholder(t) || is_terminal_punctuation(t) || stopwords.contains(t)) continue;
    if (!source.eligible(t)) continue;
    positions.push_back(i);
  }
  const auto budget = static_cast<std::size_t>(
      std::ceil(policy.max_positions_fraction * static_cast<double>(positions.size())));
  if (budget < positions.size()) {
    rng.shuffle(positions);
    positions.resize(budget);
    std::sort(positions.begin(), positions.end());
  }

  bool changed = false;
  for (std::size_t p : positions) {
    auto pool = source.candidates(tokens, p, map, policy.k);
    std::erase_if(pool, [&](const std::string& c) { return !usable_candidate(c, tokens[p]); });
    rng.shuffle(pool);
    for (const auto& candidate : pool) {
      auto trial = tokens;
      trial[p] = candidate;
      const std::string text = join_tokens(trial);
      if (!accepted_by_filter(side, text, filter)) continue;
      records.push_back({side.turn, side.response, p, tokens[p], candidate});
      tokens = std::move(trial);
      delex = text;
      changed = true;
      break;
    }
  }
  if (!changed) return;
  Realized realized = relexicalize_with_spans(delex, map);
  if (side.response) {
    turn.response = std::move(realized.text);
    turn.delex_map.response = std::move(realized.map);
  } else {
    turn.user = std::move(realized.text);
    turn.delex_map.user = std::move(realized.map);
  }
}

}  // namespace

WordAugmentResult substitute_words(const Dialog& dialog, CandidateSource& source,
                                   const StopwordList& stopwords,
                                   const SubstitutionPolicy& policy,
                                   const ConsistencyFilter& filter) {
  policy.validate();
  WordAugmentResult result{dialog, {}};
  Rng rng(policy.rng_seed);
  for (std::size_t t = 0; t < dialog.turns.size(); ++t) {
    substitute_side({result.dialog, t, false}, source, stopwords, policy, filter, rng,
                    result.substitutions);
    if (policy.substitute_responses && t + 1 < dialog.turns.size()) {
      substitute_side({result.dialog, t, true}, source, stopwords, policy, filter, rng,
                      result.substitutions);
    }
  }
  return result;
}

Dialog substitute_embedding(const Dialog& dialog, const EmbeddingTable& table,
                            const StopwordList& stopwords, const SubstitutionPolicy& policy,
                            const ConsistencyFilter& filter) {
  EmbeddingCandidates source(table);
  return substitute_words(dialog, source, stopwords, policy, filter).dialog;
}

Dialog substitute_masked_lm(const Dialog& dialog, BackendClient& client,
                            const StopwordList& stopwords, const SubstitutionPolicy& policy,
                            const ConsistencyFilter& filter) {
  MaskedLmCandidates source(client);
  return substitute_words(dialog, source, stopwords, policy, filter).dialog;
}

}  // namespace toddag
