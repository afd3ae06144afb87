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

#include "toddag/delex.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include "toddag/text.hpp"

namespace toddag {
namespace {

std::string describe(const DelexEntry& e) {
  return "{" + e.placeholder + " -> '" + e.value + "' @" +
         std::to_string(e.begin) + ".." + std::to_string(e.end) + "}";
}

struct MarkerHit {
  std::size_t begin;
  std::size_t end;
  int number;
};

// '#' followed by a maximal run of digits.
std::vector<MarkerHit> scan_markers(std::string_view text) {
  std::vector<MarkerHit> hits;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    if (j == i + 1 || j - i - 1 > 9) continue;
    hits.push_back({i, j, std::stoi(std::string(text.substr(i + 1, j - i - 1)))});
    i = j - 1;
  }
  return hits;
}

}  // namespace

void check_delex_map(std::string_view utterance, const DelexMap& map) {
  std::size_t previous_end = 0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& e = map[i];
    if (!is_placeholder(e.placeholder)) {
      throw DelexError("non-canonical placeholder in entry " + describe(e));
    }
    if (e.begin >= e.end || e.end > utterance.size()) {
      throw DelexError("span out of range in entry " + describe(e));
    }
    if (i > 0 && e.begin < previous_end) {
      throw DelexError("overlapping or unsorted span in entry " + describe(e));
    }
    if (utterance.substr(e.begin, e.end - e.begin) != e.value) {
      throw DelexError("span/value mismatch in entry " + describe(e) +
                       ": utterance holds '" +
                       std::string(utterance.substr(e.begin, e.end - e.begin)) +
                       "'");
    }
    previous_end = e.end;
  }
}

std::string delexicalize(std::string_view utterance, const DelexMap& map) {
  check_delex_map(utterance, map);
  std::string out;
  std::size_t cursor = 0;
  for (const auto& e : map) {
    out.append(utterance.substr(cursor, e.begin - cursor));
    out += e.placeholder;
    cursor = e.end;
  }
  out.append(utterance.substr(cursor));
  return out;
}

Realized relexicalize_ordered(std::string_view delex_text,
                              const DelexMap& entries) {
  const auto spans = find_placeholders(delex_text);
  if (spans.size() != entries.size()) {
    throw DelexError("text has " + std::to_string(spans.size()) +
                     " placeholders but " + std::to_string(entries.size()) +
                     " entries were supplied");
  }
  Realized out;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto token =
        delex_text.substr(spans[k].begin, spans[k].end - spans[k].begin);
    if (token != entries[k].placeholder) {
      throw DelexError("placeholder " + std::string(token) +
                       " does not match entry " + describe(entries[k]));
    }
    out.text.append(delex_text.substr(cursor, spans[k].begin - cursor));
    DelexEntry entry = entries[k];
    entry.begin = out.text.size();
    out.text += entry.value;
    entry.end = out.text.size();
    out.map.push_back(std::move(entry));
    cursor = spans[k].end;
  }
  out.text.append(delex_text.substr(cursor));
  return out;
}

Realized relexicalize_with_spans(std::string_view delex_text,
                                 const DelexMap& map) {
  std::map<std::string, std::deque<const DelexEntry*>> queues;
  for (const auto& e : map) queues[e.placeholder].push_back(&e);
  DelexMap ordered;
  for (const auto& token : placeholders_in(delex_text)) {
    auto it = queues.find(token);
    if (it == queues.end() || it->second.empty()) {
      throw DelexError("placeholder " + token + " has no delex map entry");
    }
    ordered.push_back(*it->second.front());
    it->second.pop_front();
  }
  for (const auto& [token, queue] : queues) {
    if (!queue.empty()) {
      throw DelexError("delex map entry " + describe(*queue.front()) +
                       " has no placeholder in the text");
    }
  }
  return relexicalize_ordered(delex_text, ordered);
}

std::string relexicalize(std::string_view delex_text, const DelexMap& map) {
  return relexicalize_with_spans(delex_text, map).text;
}

std::string marker_token(int k) { return "#" + std::to_string(k); }

ProtectedText protect(std::string_view delex_text) {
  // Numbering starts past any "#n" already present so that markers stay
  // unique within the text.
  int offset = 0;
  for (const auto& hit : scan_markers(delex_text)) {
    offset = std::max(offset, hit.number);
  }
  ProtectedText out;
  std::size_t cursor = 0;
  int k = offset;
  for (const auto& span : find_placeholders(delex_text)) {
    ++k;
    out.text.append(delex_text.substr(cursor, span.begin - cursor));
    out.text += marker_token(k);
    out.markers.emplace(
        k, std::string(delex_text.substr(span.begin, span.end - span.begin)));
    cursor = span.end;
  }
  out.text.append(delex_text.substr(cursor));
  return out;
}

std::optional<RestoredText> restore_tracked(
    std::string_view text, const std::map<int, std::string>& markers) {
  // Placeholders that were never protected mean the text was tampered with.
  if (!find_placeholders(text).empty()) return std::nullopt;
  std::map<int, int> seen;
  std::vector<MarkerHit> used;
  for (const auto& hit : scan_markers(text)) {
    if (markers.contains(hit.number)) {
      ++seen[hit.number];
      used.push_back(hit);
    }
  }
  for (const auto& [k, placeholder] : markers) {
    if (seen[k] != 1) return std::nullopt;
  }
  RestoredText out;
  std::size_t cursor = 0;
  for (const auto& hit : used) {
    out.text.append(text.substr(cursor, hit.begin - cursor));
    out.text += markers.at(hit.number);
    out.marker_order.push_back(hit.number);
    cursor = hit.end;
  }
  out.text.append(text.substr(cursor));
  return out;
}

std::optional<std::string> restore(std::string_view text,
                                   const std::map<int, std::string>& markers) {
  auto tracked = restore_tracked(text, markers);
  if (!tracked) return std::nullopt;
  return std::move(tracked->text);
}

std::optional<std::string> restore(const ProtectedText& text) {
  return restore(text.text, text.markers);
}

}  // namespace toddag
