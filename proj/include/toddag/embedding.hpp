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

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "toddag/error.hpp"

namespace toddag {

class EmbeddingError : public Error {
 public:
  using Error::Error;
};

// Cosine similarity dot(a,b) / (|a| |b|), accumulated in double.
// Throws std::invalid_argument on a dimension mismatch or a zero vector.
template <typename T>
double cosine(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]);
    const double y = static_cast<double>(b[i]);
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

template <typename T>
double cosine(const std::vector<T>& a, const std::vector<T>& b) {
  return cosine(std::span<const T>(a), std::span<const T>(b));
}

struct Neighbor {
  std::string word;
  double similarity = 0.0;

  bool operator==(const Neighbor&) const = default;
};

// Immutable word -> vector table read from the plain-text word2vec format:
// a "V d" header line followed by V lines of "word v1 ... vd".
class EmbeddingTable {
 public:
  EmbeddingTable(std::vector<std::string> words, std::vector<float> data,
                 std::size_t dimension);

  static EmbeddingTable parse(std::istream& in);
  static EmbeddingTable load(const std::filesystem::path& path);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  // Lookups lowercase the query first.
  bool contains(std::string_view word) const;
  std::span<const float> vector(std::string_view word) const;

  // The k most similar other words, by cosine similarity descending, ties
  // broken by word ascending. nullopt when the query is out of vocabulary
  // (or has a zero vector). Zero-vector entries are never returned.
  std::optional<std::vector<Neighbor>> top_k_neighbors(std::string_view word,
                                                       std::size_t k) const;

 private:
  std::optional<std::size_t> index_of(std::string_view word) const;
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dimension_, dimension_};
  }

  std::vector<std::string> words_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::size_t dimension_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Lowercase stopwords. The built-in list is versioned; see kStopwordListVersion.
class StopwordList {
 public:
  explicit StopwordList(std::set<std::string> words);

  static StopwordList english();
  // One word per line; blank lines and lines starting with '#' are skipped.
  static StopwordList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string, std::less<>> words_;
};

inline constexpr std::string_view kStopwordListVersion = "toddag-en-1";

}  // namespace toddag
