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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toddag/error.hpp"

namespace toddag {

class ParseFormatError : public Error {
 public:
  using Error::Error;
};

struct DepToken {
  std::string form;
  std::size_t head = 0;  // 1-based; 0 marks the root
  std::string deprel;

  bool operator==(const DepToken&) const = default;
};

// One dependency-parsed sentence.
struct DependencyParse {
  std::vector<DepToken> tokens;

  // 0-based index of the single token whose head is 0.
  std::size_t root() const;
  // Exactly one root, heads in range, no cycles. Throws ParseFormatError.
  void validate() const;
  std::vector<std::string> forms() const;
};

// The relation without its subtype: "obl:tmod" -> "obl".
std::string_view base_relation(std::string_view deprel);

// Sentences of every (turn, speaker) in one CoNLL-U file. Each sentence block
// carries "# turn = N" and "# speaker = user|system" comments; several
// consecutive blocks with the same key form one multi-sentence utterance.
// Multiword-token ranges ("1-2") and empty nodes ("1.1") are skipped.
using TurnParses = std::map<std::pair<std::size_t, std::string>, std::vector<DependencyParse>>;

TurnParses parse_conllu(std::string_view text, const std::string& source_name);

// Parses for a directory of "<dialog_id>.conllu" sidecar files, loaded
// eagerly; read-only afterwards and safe to share between threads.
class ParseStore {
 public:
  ParseStore() = default;
  explicit ParseStore(const std::filesystem::path& dir);

  void add(std::string dialog_id, TurnParses parses);
  // nullptr when no parse exists for the utterance.
  const std::vector<DependencyParse>* find(std::string_view dialog_id, std::size_t turn,
                                           std::string_view speaker = "user") const;
  std::size_t dialogs() const { return parses_.size(); }

 private:
  std::map<std::string, TurnParses, std::less<>> parses_;
};

}  // namespace toddag
