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

#include <filesystem>
#include <string>
#include <vector>

#include "toddag/corpus.hpp"

namespace toddag {

// Raised when source annotations cannot be mapped or are inconsistent.
// issues() lists every problem found (dialog id first), so a whole directory
// can be repaired in one pass.
class IngestError : public Error {
 public:
  explicit IngestError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Expects MultiWOZ 2.0 layout in raw_dir:
//   data.json            dialogs with "goal" and "log"   (required)
//   dialogue_acts.json   system acts per turn            (optional)
//   valListFile.txt      validation ids, one per line    (optional)
//   testListFile.txt     test ids, one per line          (optional)
// Text is whitespace/punctuation normalized, values found in the turn's
// state and acts are delexicalized to "[value_<slot>]".
Corpus ingest_multiwoz(const std::filesystem::path& raw_dir);

// Expects kvret_{train,dev,test}_public.json in raw_dir (at least one).
// Each dialog is single-domain: its domain is the scenario intent.
Corpus ingest_kvret(const std::filesystem::path& raw_dir);

// Builds the delex map for `text` from candidate (slot, value) pairs:
// longest values first, case-insensitive, token-aligned, non-overlapping.
DelexMap find_values(const std::string& text,
                     const std::vector<std::pair<std::string, std::string>>& candidates);

}  // namespace toddag
