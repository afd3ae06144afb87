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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "toddag/backend.hpp"
#include "toddag/corpus.hpp"
#include "toddag/embedding.hpp"
#include "toddag/filter.hpp"

namespace toddag {

struct SubstitutionPolicy {
  std::size_t k = 10;                   // candidate pool size per position
  double max_positions_fraction = 1.0;  // share of eligible positions attempted
  std::uint64_t rng_seed = 0;
  // Also substitute system responses. A response candidate is accepted when
  // the next turn's gold state and acts are still predicted with it in the
  // context; the last response is never substituted.
  bool substitute_responses = false;

  void validate() const;
};

// Supplies replacement candidates for one token position.
class CandidateSource {
 public:
  virtual ~CandidateSource() = default;
  // Whether a (non-stopword, non-placeholder, non-punctuation) token may be
  // substituted at all.
  virtual bool eligible(std::string_view token) const = 0;
  // Up to k candidates for tokens[position]. `map` relexicalizes the
  // delexicalized tokens.
  virtual std::vector<std::string> candidates(const std::vector<std::string>& tokens,
                                              std::size_t position, const DelexMap& map,
                                              std::size_t k) = 0;
};

// The k nearest embedding neighbors of the word.
class EmbeddingCandidates : public CandidateSource {
 public:
  explicit EmbeddingCandidates(const EmbeddingTable& table) : table_(table) {}
  bool eligible(std::string_view token) const override;
  std::vector<std::string> candidates(const std::vector<std::string>& tokens,
                                      std::size_t position, const DelexMap& map,
                                      std::size_t k) override;

 private:
  const EmbeddingTable& table_;
};

// The backend's top-k fill-mask tokens for the position, computed on the
// lexical utterance with the word masked. Candidates equal to the original
// word (ignoring case) are dropped.
class MaskedLmCandidates : public CandidateSource {
 public:
  explicit MaskedLmCandidates(BackendClient& client) : client_(client) {}
  bool eligible(std::string_view token) const override;
  std::vector<std::string> candidates(const std::vector<std::string>& tokens,
                                      std::size_t position, const DelexMap& map,
                                      std::size_t k) override;

 private:
  BackendClient& client_;
};

struct SubstitutionRecord {
  std::size_t turn = 0;
  bool response = false;  // false: user side
  std::size_t position = 0;
  std::string original;
  std::string replacement;
};

struct WordAugmentResult {
  Dialog dialog;
  std::vector<SubstitutionRecord> substitutions;
};

// Word-level substitution over a whole dialog, turn by turn. For every
// attempted eligible position the candidate pool is shuffled and tried in
// that order; the first candidate the filter accepts replaces the word,
// otherwise the word stays. The filter sees the already-augmented earlier
// turns as context. Only utterance text changes; placeholders, states,
// acts and delex values are untouched.
WordAugmentResult substitute_words(const Dialog& dialog, CandidateSource& source,
                                   const StopwordList& stopwords,
                                   const SubstitutionPolicy& policy,
                                   const ConsistencyFilter& filter);

Dialog substitute_embedding(const Dialog& dialog, const EmbeddingTable& table,
                            const StopwordList& stopwords, const SubstitutionPolicy& policy,
                            const ConsistencyFilter& filter);

Dialog substitute_masked_lm(const Dialog& dialog, BackendClient& client,
                            const StopwordList& stopwords, const SubstitutionPolicy& policy,
                            const ConsistencyFilter& filter);

}  // namespace toddag
