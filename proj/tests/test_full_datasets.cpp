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

// Checks against the released datasets. Skipped unless MULTIWOZ_DIR or
// KVRET_DIR points at an unpacked copy.
#include <gtest/gtest.h>

#include <cstdlib>

#include "toddag/ingest.hpp"

using namespace toddag;

namespace {

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? v : nullptr;
}

}  // namespace

TEST(FullMultiwoz, DialogAndSplitCounts) {
  const char* dir = env("MULTIWOZ_DIR");
  if (dir == nullptr) GTEST_SKIP() << "MULTIWOZ_DIR not set";
  const Corpus c = ingest_multiwoz(dir);
  EXPECT_EQ(c.dialogs.size(), 10438u);
  EXPECT_EQ(c.count(Split::kValidation), 1000u);
  EXPECT_EQ(c.count(Split::kTest), 1000u);
}

TEST(FullKvret, DialogAndSplitCounts) {
  const char* dir = env("KVRET_DIR");
  if (dir == nullptr) GTEST_SKIP() << "KVRET_DIR not set";
  const Corpus c = ingest_kvret(dir);
  EXPECT_EQ(c.dialogs.size(), 2424u);
  EXPECT_EQ(c.count(Split::kValidation), 302u);
  EXPECT_EQ(c.count(Split::kTest), 304u);
  for (const auto& d : c.dialogs) EXPECT_EQ(d.domains.size(), 1u) << d.id;
}
