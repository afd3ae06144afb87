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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toddag {

// Splits on whitespace, then peels trailing '.', ',', '?' and '!' off each
// chunk into tokens of their own. Case is left untouched.
std::vector<std::string> tokenize(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

// join_tokens(tokenize(text)).
std::string normalize_text(std::string_view text);

bool is_terminal_punctuation(std::string_view token);

std::string to_lower(std::string_view text);

// Placeholder tokens have the canonical form "[value_<slot>]" where <slot> is
// one or more of [a-z0-9_].
bool is_placeholder(std::string_view token);
std::string placeholder_for(std::string_view slot);
std::optional<std::string> placeholder_slot(std::string_view token);

struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  bool operator==(const TextSpan&) const = default;
};

// All placeholder occurrences in `text`, in order of appearance.
std::vector<TextSpan> find_placeholders(std::string_view text);

// The placeholder tokens of `text` in order of appearance.
std::vector<std::string> placeholders_in(std::string_view text);

// Case-insensitive search for `needle` in `haystack` at token boundaries
// (start/end of string or a space on either side). Returns offsets of every
// match, left to right, non-overlapping.
std::vector<std::size_t> find_token_aligned(std::string_view haystack,
                                            std::string_view needle);

}  // namespace toddag
