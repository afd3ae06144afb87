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

#include "toddag/conllu.hpp"

#include <charconv>
#include <optional>
#include <sstream>

#include "toddag/corpus.hpp"

namespace toddag {

std::size_t DependencyParse::root() const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].head == 0) return i;
  }
  throw ParseFormatError("parse has no root");
}

void DependencyParse::validate() const {
  if (tokens.empty()) throw ParseFormatError("empty sentence");
  std::size_t roots = 0;
  for (const auto& t : tokens) {
    if (t.head == 0) ++roots;
    if (t.head > tokens.size()) {
      throw ParseFormatError("head " + std::to_string(t.head) + " of '" + t.form +
                             "' is out of range");
    }
  }
  if (roots != 1) {
    throw ParseFormatError("expected exactly one root, found " + std::to_string(roots));
  }
  // Every token must reach the root within n steps.
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::size_t at = i, steps = 0;
    while (tokens[at].head != 0) {
      at = tokens[at].head - 1;
      if (++steps > tokens.size()) {
        throw ParseFormatError("cycle through token '" + tokens[i].form + "'");
      }
    }
  }
}

std::vector<std::string> DependencyParse::forms() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.form);
  return out;
}

std::string_view base_relation(std::string_view deprel) {
  return deprel.substr(0, deprel.find(':'));
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return cols;
}

bool parse_index(std::string_view s, std::size_t& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

struct Block {
  std::optional<std::size_t> turn;
  std::string speaker;
  DependencyParse parse;
  std::size_t first_line = 0;
};

}  // namespace

TurnParses parse_conllu(std::string_view text, const std::string& source_name) {
  TurnParses out;
  Block block;
  std::size_t line_no = 0;
  auto fail = [&](std::size_t line, const std::string& msg) {
    throw ParseFormatError(source_name + ":" + std::to_string(line) + ": " + msg);
  };
  auto flush = [&] {
    if (block.parse.tokens.empty() && !block.turn) return;
    if (!block.turn) fail(block.first_line, "sentence without '# turn = N'");
    if (block.speaker.empty()) fail(block.first_line, "sentence without '# speaker = ...'");
    try {
      block.parse.validate();
    } catch (const ParseFormatError& e) {
      fail(block.first_line, e.what());
    }
    out[{*block.turn, block.speaker}].push_back(std::move(block.parse));
    block = Block{};
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line = raw;
    if (line.empty()) {
      flush();
      continue;
    }
    if (block.first_line == 0) block.first_line = line_no;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      auto key = line.substr(1, eq - 1);
      auto value = line.substr(eq + 1);
      while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
      while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
      while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
      while (!value.empty() && value.back() == ' ') value.remove_suffix(1);
      if (key == "turn") {
        std::size_t n = 0;
        if (!parse_index(value, n)) fail(line_no, "bad turn number '" + std::string(value) + "'");
        block.turn = n;
      } else if (key == "speaker") {
        block.speaker = std::string(value);
      }
      continue;
    }
    const auto cols = split_tabs(line);
    if (cols.size() != 10) {
      fail(line_no, "expected 10 tab-separated columns, got " + std::to_string(cols.size()));
    }
    if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
    std::size_t id = 0, head = 0;
    if (!parse_index(cols[0], id)) fail(line_no, "bad token id '" + std::string(cols[0]) + "'");
    if (id != block.parse.tokens.size() + 1) fail(line_no, "token ids must be 1..n in order");
    if (!parse_index(cols[6], head)) fail(line_no, "bad head '" + std::string(cols[6]) + "'");
    block.parse.tokens.push_back({std::string(cols[1]), head, std::string(cols[7])});
  }
  flush();
  return out;
}

ParseStore::ParseStore(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ParseFormatError("parses directory '" + dir.string() + "' does not exist");
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".conllu") continue;
    add(entry.path().stem().string(),
        parse_conllu(read_file(entry.path()), entry.path().filename().string()));
  }
}

void ParseStore::add(std::string dialog_id, TurnParses parses) {
  parses_[std::move(dialog_id)] = std::move(parses);
}

const std::vector<DependencyParse>* ParseStore::find(std::string_view dialog_id,
                                                     std::size_t turn,
                                                     std::string_view speaker) const {
  auto d = parses_.find(dialog_id);
  if (d == parses_.end()) return nullptr;
  auto t = d->second.find({turn, std::string(speaker)});
  return t == d->second.end() ? nullptr : &t->second;
}

}  // namespace toddag
