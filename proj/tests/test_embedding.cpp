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

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "toddag/corpus.hpp"
#include "toddag/embedding.hpp"

using namespace toddag;

TEST(Cosine, KnownValues) {
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 2}, std::vector<double>{2, 4}), 1.0);
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 1}, std::vector<double>{-1, -1}), -1.0);
  EXPECT_NEAR(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 1}), std::sqrt(0.5), 1e-15);
  EXPECT_THROW(cosine(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
  EXPECT_THROW(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(Embedding, ParseAndLookup) {
  std::istringstream in("3 2\nNorth 1 0\nsouth 0 1\nzero 0 0\n");
  const EmbeddingTable t = EmbeddingTable::parse(in);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.dimension(), 2u);
  EXPECT_TRUE(t.contains("NORTH"));
  EXPECT_FALSE(t.contains("east"));
  EXPECT_EQ(t.top_k_neighbors("east", 3), std::nullopt);
  EXPECT_EQ(t.top_k_neighbors("zero", 3), std::nullopt);
  const auto n = t.top_k_neighbors("north", 5);
  ASSERT_TRUE(n);
  ASSERT_EQ(n->size(), 1u);  // zero vector excluded
  EXPECT_EQ((*n)[0].word, "south");
}

TEST(Embedding, MalformedInput) {
  std::istringstream short_row("2 3\na 1 2 3\nb 1 2\n");
  EXPECT_THROW(EmbeddingTable::parse(short_row), EmbeddingError);
  std::istringstream bad_header("x 3\n");
  EXPECT_THROW(EmbeddingTable::parse(bad_header), EmbeddingError);
}

// Brute-force ranking over the fixture vocabulary.
TEST(Embedding, TopKMatchesBruteForce) {
  const EmbeddingTable t = EmbeddingTable::load(oracle::data_path("fixtures/embeddings.txt"));
  for (const auto& w : t.words()) {
    std::vector<std::pair<double, std::string>> all;
    const auto q = t.vector(w);
    for (const auto& o : t.words()) {
      if (o == w) continue;
      const auto v = t.vector(o);
      double dot = 0, nq = 0, nv = 0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        dot += double(q[i]) * v[i];
        nq += double(q[i]) * q[i];
        nv += double(v[i]) * v[i];
      }
      all.emplace_back(-dot / std::sqrt(nq * nv), o);
    }
    std::sort(all.begin(), all.end());
    for (std::size_t k : {1u, 5u, 100u}) {
      const auto got = t.top_k_neighbors(w, k);
      ASSERT_TRUE(got);
      ASSERT_EQ(got->size(), std::min(k, all.size()));
      for (std::size_t i = 0; i < got->size(); ++i) {
        EXPECT_EQ((*got)[i].word, all[i].second) << w << " k=" << k;
        EXPECT_NEAR((*got)[i].similarity, -all[i].first, 1e-12);
      }
    }
  }
}

TEST(Stopwords, BuiltInAndFile) {
  const StopwordList s = StopwordList::english();
  EXPECT_TRUE(s.contains("the"));
  EXPECT_TRUE(s.contains("The"));
  EXPECT_FALSE(s.contains("hotel"));
  const auto path = std::filesystem::temp_directory_path() / "toddag-stop.txt";
  write_file(path, "# list\nfoo\n\nBar\n");
  const StopwordList f = StopwordList::load(path);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_TRUE(f.contains("bar"));
}
