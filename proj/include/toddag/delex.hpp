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

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "toddag/corpus.hpp"

namespace toddag {

class DelexError : public Error {
 public:
  using Error::Error;
};

// Checks that `map` is sorted, non-overlapping, inside `utterance`, that
// each span holds the recorded value and that every placeholder token is
// canonical. Throws DelexError naming the offending entry.
void check_delex_map(std::string_view utterance, const DelexMap& map);

// Replaces each span of `map` in `utterance` by its placeholder.
std::string delexicalize(std::string_view utterance, const DelexMap& map);

// Lexical text plus a delex map whose spans point into it.
struct Realized {
  std::string text;
  DelexMap map;
};

// Fills placeholders from `map`. Occurrences of the same placeholder consume
// that placeholder's entries in map order, so reordering distinct
// placeholders is allowed. Throws DelexError on a placeholder with no
// remaining entry, or on entries left unused.
std::string relexicalize(std::string_view delex_text, const DelexMap& map);
Realized relexicalize_with_spans(std::string_view delex_text,
                                 const DelexMap& map);

// Strictly positional variant: the k-th placeholder occurrence takes the
// value of entries[k], whose placeholder must match. Spans in `entries` are
// ignored and recomputed.
Realized relexicalize_ordered(std::string_view delex_text,
                              const DelexMap& entries);

// Delexicalized text with each placeholder occurrence swapped for a "#k"
// marker. markers: k -> placeholder token.
struct ProtectedText {
  std::string text;
  std::map<int, std::string> markers;
};

std::string marker_token(int k);

ProtectedText protect(std::string_view delex_text);

// Swaps markers back for their placeholders. Returns nullopt (rejection)
// when a marker is missing or repeated, or when the placeholder multiset of
// the result differs from the protected one.
std::optional<std::string> restore(const ProtectedText& text);
std::optional<std::string> restore(std::string_view text,
                                   const std::map<int, std::string>& markers);

// Like restore, but also reports which marker each restored placeholder
// came from, in order of appearance in the result.
struct RestoredText {
  std::string text;
  std::vector<int> marker_order;
};
std::optional<RestoredText> restore_tracked(
    std::string_view text, const std::map<int, std::string>& markers);

}  // namespace toddag
