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

#include "toddag/text.hpp"

#include <algorithm>
#include <cctype>

namespace toddag {
namespace {

constexpr std::string_view kPlaceholderPrefix = "[value_";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_slot_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_terminal(char c) { return c == '.' || c == ',' || c == '?' || c == '!'; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (start == i) break;
    std::string_view chunk = text.substr(start, i - start);
    std::size_t cut = chunk.size();
    while (cut > 0 && is_terminal(chunk[cut - 1])) --cut;
    if (cut > 0) tokens.emplace_back(chunk.substr(0, cut));
    for (std::size_t p = cut; p < chunk.size(); ++p) {
      tokens.emplace_back(1, chunk[p]);
    }
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string normalize_text(std::string_view text) {
  const auto tokens = tokenize(text);
  return join_tokens(tokens);
}

bool is_terminal_punctuation(std::string_view token) {
  return token.size() == 1 && is_terminal(token[0]);
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool is_placeholder(std::string_view token) {
  if (token.size() <= kPlaceholderPrefix.size() + 1) return false;
  if (!token.starts_with(kPlaceholderPrefix) || token.back() != ']') {
    return false;
  }
  const auto slot = token.substr(kPlaceholderPrefix.size(),
                                 token.size() - kPlaceholderPrefix.size() - 1);
  return std::all_of(slot.begin(), slot.end(), is_slot_char);
}

std::string placeholder_for(std::string_view slot) {
  std::string out(kPlaceholderPrefix);
  out += slot;
  out.push_back(']');
  return out;
}

std::optional<std::string> placeholder_slot(std::string_view token) {
  if (!is_placeholder(token)) return std::nullopt;
  return std::string(token.substr(kPlaceholderPrefix.size(),
                                  token.size() - kPlaceholderPrefix.size() - 1));
}

std::vector<TextSpan> find_placeholders(std::string_view text) {
  std::vector<TextSpan> spans;
  std::size_t pos = 0;
  while ((pos = text.find(kPlaceholderPrefix, pos)) != std::string_view::npos) {
    std::size_t end = pos + kPlaceholderPrefix.size();
    while (end < text.size() && is_slot_char(text[end])) ++end;
    if (end < text.size() && text[end] == ']' &&
        end > pos + kPlaceholderPrefix.size()) {
      spans.push_back({pos, end + 1});
      pos = end + 1;
    } else {
      ++pos;
    }
  }
  return spans;
}

std::vector<std::string> placeholders_in(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& span : find_placeholders(text)) {
    out.emplace_back(text.substr(span.begin, span.end - span.begin));
  }
  return out;
}

std::vector<std::size_t> find_token_aligned(std::string_view haystack,
                                            std::string_view needle) {
  std::vector<std::size_t> hits;
  if (needle.empty() || needle.size() > haystack.size()) return hits;
  const std::string hay = to_lower(haystack);
  const std::string pin = to_lower(needle);
  std::size_t pos = 0;
  while ((pos = hay.find(pin, pos)) != std::string::npos) {
    const std::size_t end = pos + pin.size();
    const bool left_ok = pos == 0 || is_space(hay[pos - 1]);
    const bool right_ok = end == hay.size() || is_space(hay[end]);
    if (left_ok && right_ok) {
      hits.push_back(pos);
      pos = end;
    } else {
      ++pos;
    }
  }
  return hits;
}

}  // namespace toddag
