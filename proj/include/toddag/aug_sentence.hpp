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

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "toddag/backend.hpp"
#include "toddag/conllu.hpp"
#include "toddag/corpus.hpp"
#include "toddag/random.hpp"

namespace toddag {

// Outcome of a turn-level transform. On rejection `turn` is a copy of the
// original and `reason` says why.
struct TurnResult {
  Turn turn;
  bool accepted = false;
  std::string reason;
};

// Protects the placeholders of user_delex, translates source -> pivot ->
// source and restores. Rejects when a marker was lost or duplicated.
TurnResult back_translate(const Turn& turn, BackendClient& client, std::string_view pivot,
                          std::string_view source_language = "en");

// Asks for n paraphrases of user_delex, picks one uniformly and keeps it
// only if its placeholder multiset equals the original's.
TurnResult paraphrase(const Turn& turn, BackendClient& client, Rng& rng, std::size_t n = 2);

// Prompt sent to the chat backend for one lexical utterance.
std::string llm_prompt(std::string_view utterance);

// Splits a chat reply into exactly two paraphrases. Tried in order:
// "1." / "2." numbering, "-" bullets, exactly two non-empty lines.
std::optional<std::array<std::string, 2>> parse_two_paraphrases(std::string_view reply);

// Paraphrases the lexical user utterance through the chat backend, picks
// one of the two replies uniformly, and keeps it only if every delex value
// occurs in it (case-insensitive, token-aligned); the values are then
// delexicalized again by matching.
TurnResult llm_paraphrase(const Turn& turn, BackendClient& client, Rng& rng);

struct RotationConfig {
  // Base relations (subtype stripped) whose root subtrees may move.
  std::set<std::string> rotatable = {"nsubj", "csubj", "obj", "iobj", "obl", "advmod"};
  // Permutations are enumerated up to this many fragments and sampled
  // beyond it.
  std::size_t enumerate_limit = 7;
};

// A fragment: the contiguous token span [begin, end) of a subtree hanging
// off the root through a rotatable relation.
struct Fragment {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Fragment&) const = default;
};

std::vector<Fragment> rotatable_fragments(const DependencyParse& parse,
                                          const RotationConfig& config);

// Token order after placing fragment order[j] into the j-th fragment slot;
// all other tokens stay where they are. Returns original token indices.
std::vector<std::size_t> apply_rotation(std::size_t token_count,
                                        const std::vector<Fragment>& fragments,
                                        const std::vector<std::size_t>& order);

// Every distinct non-identity reordering of one sentence's tokens, as
// index sequences, in lexicographic permutation order.
std::vector<std::vector<std::size_t>> rotation_candidates(const DependencyParse& parse,
                                                          const RotationConfig& config);

// Rotates each sentence of user_delex independently, drawing one candidate
// per sentence uniformly. Rejects when no sentence has two fragments or no
// parse is available. Throws ParseFormatError when the parse tokens differ
// from the utterance tokens.
TurnResult fragment_rotate(const Turn& turn, const std::vector<DependencyParse>* sentences,
                           const RotationConfig& config, Rng& rng);

}  // namespace toddag
