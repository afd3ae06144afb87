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

#include "toddag/aug_sentence.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <regex>

#include "toddag/delex.hpp"
#include "toddag/text.hpp"

namespace toddag {

namespace {

TurnResult reject(const Turn& turn, std::string reason) {
  return {turn, false, std::move(reason)};
}

TurnResult accept(Turn turn) { return {std::move(turn), true, {}}; }

std::vector<std::string> sorted_placeholders(std::string_view text) {
  auto p = placeholders_in(text);
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Back-translation.

TurnResult back_translate(const Turn& turn, BackendClient& client, std::string_view pivot,
                          std::string_view source_language) {
  const ProtectedText protected_text = protect(turn.user_delex);
  const std::string there = client.translate(protected_text.text, source_language, pivot);
  const std::string back = client.translate(there, pivot, source_language);
  const std::string normalized = normalize_text(back);
  if (normalized.empty()) return reject(turn, "empty translation");
  const auto restored = restore_tracked(normalized, protected_text.markers);
  if (!restored) return reject(turn, "protection marker lost or duplicated");

  // Markers number placeholder occurrences left to right, so the i-th
  // smallest marker belongs to the i-th delex entry.
  std::map<int, std::size_t> occurrence;
  for (const auto& [k, placeholder] : protected_text.markers) {
    occurrence.emplace(k, occurrence.size());
  }
  DelexMap entries;
  for (int k : restored->marker_order) entries.push_back(turn.delex_map.user.at(occurrence.at(k)));

  Realized realized = relexicalize_ordered(restored->text, entries);
  Turn out = turn;
  out.user_delex = restored->text;
  out.user = std::move(realized.text);
  out.delex_map.user = std::move(realized.map);
  return accept(std::move(out));
}

// ---------------------------------------------------------------------------
// Paraphrase backend.

TurnResult paraphrase(const Turn& turn, BackendClient& client, Rng& rng, std::size_t n) {
  const auto candidates = client.paraphrase(turn.user_delex, n);
  if (candidates.empty()) return reject(turn, "no paraphrase returned");
  const std::string chosen = normalize_text(candidates[rng.uniform(candidates.size())]);
  if (chosen.empty()) return reject(turn, "empty paraphrase");
  if (sorted_placeholders(chosen) != sorted_placeholders(turn.user_delex)) {
    return reject(turn, "paraphrase changed the placeholders");
  }
  Realized realized = relexicalize_with_spans(chosen, turn.delex_map.user);
  Turn out = turn;
  out.user_delex = chosen;
  out.user = std::move(realized.text);
  out.delex_map.user = std::move(realized.map);
  return accept(std::move(out));
}

// ---------------------------------------------------------------------------
// LLM paraphrase.

std::string llm_prompt(std::string_view utterance) {
  return "Paraphrase the following sentence twice. Maintain as much information as possible "
         "intact. The sentence to paraphrase is : " +
         std::string(utterance);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = trim(text.substr(start, nl == std::string_view::npos ? nl : nl - start));
    if (!line.empty()) out.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

}  // namespace

std::optional<std::array<std::string, 2>> parse_two_paraphrases(std::string_view reply) {
  std::string flat(reply);
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  std::replace(flat.begin(), flat.end(), '\r', ' ');

  // "1. X 2. Y" on one or several lines.
  static const std::regex numbered(R"((?:^|\s)1[.)]\s+(.*?)\s+2[.)]\s+(.*)$)");
  std::smatch m;
  if (std::regex_search(flat, m, numbered)) {
    static const std::regex third(R"((?:^|\s)3[.)]\s)");
    if (std::regex_search(m[2].first, m[2].second, third)) return std::nullopt;
    std::array<std::string, 2> out{trim(m[1].str()), trim(m[2].str())};
    if (out[0].empty() || out[1].empty()) return std::nullopt;
    return out;
  }

  const auto lines = lines_of(reply);
  std::vector<std::string> bullets;
  for (const auto& line : lines) {
    if (line.starts_with("-")) bullets.push_back(trim(std::string_view(line).substr(1)));
  }
  if (!bullets.empty()) {
    if (bullets.size() != 2 || bullets[0].empty() || bullets[1].empty()) return std::nullopt;
    return std::array<std::string, 2>{bullets[0], bullets[1]};
  }
  if (lines.size() == 2) return std::array<std::string, 2>{lines[0], lines[1]};
  return std::nullopt;
}

TurnResult llm_paraphrase(const Turn& turn, BackendClient& client, Rng& rng) {
  const auto parsed = parse_two_paraphrases(client.chat(llm_prompt(turn.user)));
  if (!parsed) return reject(turn, "reply does not hold two paraphrases");
  const std::string chosen = normalize_text((*parsed)[rng.uniform(2)]);
  if (chosen.empty()) return reject(turn, "empty paraphrase");

  // Claim one occurrence per delex entry, longest values first.
  const DelexMap& original = turn.delex_map.user;
  std::vector<std::size_t> by_length(original.size());
  std::iota(by_length.begin(), by_length.end(), 0);
  std::stable_sort(by_length.begin(), by_length.end(), [&](std::size_t a, std::size_t b) {
    return original[a].value.size() > original[b].value.size();
  });
  struct Claim {
    std::size_t begin, end, entry;
  };
  std::vector<Claim> claims;
  for (std::size_t e : by_length) {
    const std::string& value = original[e].value;
    bool found = false;
    for (std::size_t at : find_token_aligned(chosen, value)) {
      const std::size_t end = at + value.size();
      const bool overlaps = std::any_of(claims.begin(), claims.end(), [&](const Claim& c) {
        return at < c.end && c.begin < end;
      });
      if (overlaps) continue;
      claims.push_back({at, end, e});
      found = true;
      break;
    }
    if (!found) return reject(turn, "paraphrase lost the value '" + value + "'");
  }
  std::sort(claims.begin(), claims.end(),
            [](const Claim& a, const Claim& b) { return a.begin < b.begin; });

  // Rewrite claimed spans with the original surface so values are kept
  // byte-identical, then delexicalize again.
  Turn out = turn;
  out.user.clear();
  out.delex_map.user.clear();
  std::size_t cursor = 0;
  for (const auto& c : claims) {
    out.user.append(chosen, cursor, c.begin - cursor);
    const DelexEntry& source = original[c.entry];
    const std::size_t begin = out.user.size();
    out.user += source.value;
    out.delex_map.user.push_back({source.placeholder, source.value, begin, out.user.size()});
    cursor = c.end;
  }
  out.user.append(chosen, cursor);
  out.user_delex = delexicalize(out.user, out.delex_map.user);
  return accept(std::move(out));
}

// ---------------------------------------------------------------------------
// Fragment rotation.

std::vector<Fragment> rotatable_fragments(const DependencyParse& parse,
                                          const RotationConfig& config) {
  const std::size_t n = parse.tokens.size();
  const std::size_t root = parse.root();
  // owner[i]: the child of the root whose subtree holds token i.
  std::vector<std::size_t> owner(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t at = i;
    while (parse.tokens[at].head != 0 && parse.tokens[at].head - 1 != root) {
      at = parse.tokens[at].head - 1;
    }
    if (at != root) owner[i] = at;
  }
  std::vector<Fragment> out;
  for (std::size_t c = 0; c < n; ++c) {
    if (parse.tokens[c].head != root + 1) continue;
    if (!config.rotatable.contains(std::string(base_relation(parse.tokens[c].deprel)))) continue;
    std::size_t lo = n, hi = 0, count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (owner[i] != c) continue;
      lo = std::min(lo, i);
      hi = std::max(hi, i);
      ++count;
    }
    if (count == hi - lo + 1) out.push_back({lo, hi + 1});
  }
  std::sort(out.begin(), out.end(),
            [](const Fragment& a, const Fragment& b) { return a.begin < b.begin; });
  return out;
}

std::vector<std::size_t> apply_rotation(std::size_t token_count,
                                        const std::vector<Fragment>& fragments,
                                        const std::vector<std::size_t>& order) {
  std::vector<std::size_t> out;
  out.reserve(token_count);
  std::size_t slot = 0;
  for (std::size_t i = 0; i < token_count;) {
    if (slot < fragments.size() && i == fragments[slot].begin) {
      const Fragment& f = fragments[order[slot]];
      for (std::size_t j = f.begin; j < f.end; ++j) out.push_back(j);
      i = fragments[slot].end;
      ++slot;
    } else {
      out.push_back(i++);
    }
  }
  return out;
}

namespace {

std::vector<std::string> reorder(const std::vector<std::string>& forms,
                                 const std::vector<std::size_t>& order) {
  std::vector<std::string> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(forms[i]);
  return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> rotation_candidates(const DependencyParse& parse,
                                                          const RotationConfig& config) {
  const auto fragments = rotatable_fragments(parse, config);
  if (fragments.size() < 2) return {};
  const auto forms = parse.forms();
  std::vector<std::size_t> perm(fragments.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::vector<std::string>> seen{forms};
  std::vector<std::vector<std::size_t>> out;
  while (std::next_permutation(perm.begin(), perm.end())) {
    auto order = apply_rotation(forms.size(), fragments, perm);
    if (seen.insert(reorder(forms, order)).second) out.push_back(std::move(order));
  }
  return out;
}

namespace {

// One non-identity reordering drawn uniformly, or nullopt.
std::optional<std::vector<std::size_t>> draw_rotation(const DependencyParse& parse,
                                                      const RotationConfig& config, Rng& rng) {
  const auto fragments = rotatable_fragments(parse, config);
  if (fragments.size() < 2) return std::nullopt;
  if (fragments.size() <= config.enumerate_limit) {
    auto all = rotation_candidates(parse, config);
    if (all.empty()) return std::nullopt;
    return std::move(all[rng.uniform(all.size())]);
  }
  // Too many fragments to enumerate: rejection-sample permutations.
  const auto forms = parse.forms();
  std::vector<std::size_t> perm(fragments.size());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    auto order = apply_rotation(forms.size(), fragments, perm);
    if (reorder(forms, order) != forms) return order;
  }
  return std::nullopt;
}

}  // namespace

TurnResult fragment_rotate(const Turn& turn, const std::vector<DependencyParse>* sentences,
                           const RotationConfig& config, Rng& rng) {
  if (sentences == nullptr || sentences->empty()) return reject(turn, "no dependency parse");
  const auto tokens = tokenize(turn.user_delex);
  std::vector<std::string> parsed;
  for (const auto& s : *sentences) {
    for (const auto& t : s.tokens) parsed.push_back(t.form);
  }
  if (parsed != tokens) {
    throw ParseFormatError("parse tokens '" + join_tokens(parsed) +
                           "' do not match utterance '" + turn.user_delex + "'");
  }

  std::vector<std::size_t> order;
  order.reserve(tokens.size());
  bool rotated = false;
  std::size_t offset = 0;
  for (const auto& s : *sentences) {
    if (auto local = draw_rotation(s, config, rng)) {
      for (std::size_t i : *local) order.push_back(offset + i);
      rotated = true;
    } else {
      for (std::size_t i = 0; i < s.tokens.size(); ++i) order.push_back(offset + i);
    }
    offset += s.tokens.size();
  }
  if (!rotated) return reject(turn, "fewer than two rotatable fragments");

  // Placeholders travel with their tokens, so each keeps its own value.
  std::vector<std::vector<std::size_t>> occurrences(tokens.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t k = placeholders_in(tokens[i]).size(); k > 0; --k) {
      occurrences[i].push_back(next++);
    }
  }
  std::vector<std::string> rotated_tokens;
  DelexMap entries;
  for (std::size_t i : order) {
    rotated_tokens.push_back(tokens[i]);
    for (std::size_t k : occurrences[i]) entries.push_back(turn.delex_map.user.at(k));
  }
  Turn out = turn;
  out.user_delex = join_tokens(rotated_tokens);
  Realized realized = relexicalize_ordered(out.user_delex, entries);
  out.user = std::move(realized.text);
  out.delex_map.user = std::move(realized.map);
  return accept(std::move(out));
}

}  // namespace toddag
