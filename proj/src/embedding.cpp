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

#include "toddag/embedding.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "toddag/text.hpp"

namespace toddag {

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, std::vector<float> data,
                               std::size_t dimension)
    : words_(std::move(words)), data_(std::move(data)), dimension_(dimension) {
  if (dimension_ == 0) throw EmbeddingError("embedding dimension must be positive");
  if (data_.size() != words_.size() * dimension_) {
    throw EmbeddingError("embedding data does not match vocabulary size x dimension");
  }
  norms_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    double sum = 0.0;
    for (float x : row(i)) {
      if (!std::isfinite(x)) {
        throw EmbeddingError("non-finite component in vector for '" + words_[i] + "'");
      }
      sum += static_cast<double>(x) * static_cast<double>(x);
    }
    norms_.push_back(std::sqrt(sum));
    // Case variants share a lowercase key; the first one listed wins.
    const auto [it, added] = index_.emplace(to_lower(words_[i]), i);
    if (!added && words_[it->second] == words_[i]) {
      throw EmbeddingError("duplicate word '" + words_[i] + "'");
    }
  }
}

EmbeddingTable EmbeddingTable::parse(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw EmbeddingError("missing 'V d' header");
  std::istringstream header(line);
  std::size_t vocab = 0, dim = 0;
  if (!(header >> vocab >> dim) || dim == 0) {
    throw EmbeddingError("malformed header '" + line + "', expected 'V d'");
  }
  std::vector<std::string> words;
  std::vector<float> data;
  words.reserve(vocab);
  data.reserve(vocab * dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string word;
    row >> word;
    std::size_t read = 0;
    float value = 0.0f;
    while (row >> value) {
      data.push_back(value);
      ++read;
    }
    if (read != dim) {
      throw EmbeddingError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(dim) + " components, got " + std::to_string(read));
    }
    words.push_back(std::move(word));
  }
  if (words.size() != vocab) {
    throw EmbeddingError("header declares " + std::to_string(vocab) + " words, file has " +
                         std::to_string(words.size()));
  }
  return EmbeddingTable(std::move(words), std::move(data), dim);
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EmbeddingError("cannot open embeddings '" + path.string() + "'");
  return parse(in);
}

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view word) const {
  auto it = index_.find(to_lower(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool EmbeddingTable::contains(std::string_view word) const {
  return index_of(word).has_value();
}

std::span<const float> EmbeddingTable::vector(std::string_view word) const {
  auto i = index_of(word);
  if (!i) throw EmbeddingError("'" + std::string(word) + "' is out of vocabulary");
  return row(*i);
}

std::optional<std::vector<Neighbor>> EmbeddingTable::top_k_neighbors(std::string_view word,
                                                                     std::size_t k) const {
  if (k == 0) throw std::invalid_argument("top_k_neighbors: k must be >= 1");
  const auto query = index_of(word);
  if (!query || norms_[*query] == 0.0) return std::nullopt;
  const auto q = row(*query);
  std::vector<Neighbor> all;
  all.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (i == *query || norms_[i] == 0.0) continue;
    double dot = 0.0;
    const auto v = row(i);
    for (std::size_t d = 0; d < dimension_; ++d) {
      dot += static_cast<double>(q[d]) * static_cast<double>(v[d]);
    }
    all.push_back({words_[i], dot / (norms_[*query] * norms_[i])});
  }
  const auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.word < b.word;
  };
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    better);
  all.resize(take);
  return all;
}

StopwordList::StopwordList(std::set<std::string> words) {
  for (const auto& w : words) words_.insert(to_lower(w));
  if (words_.empty()) throw Error("stopword list must not be empty");
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stopword list '" + path.string() + "'");
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.insert(line);
  }
  return StopwordList(std::move(words));
}

bool StopwordList::contains(std::string_view word) const {
  return words_.contains(to_lower(word));
}

}  // namespace toddag
