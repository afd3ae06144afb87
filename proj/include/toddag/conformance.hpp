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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "toddag/backend.hpp"
#include "toddag/mock_backend.hpp"

namespace toddag {

// One wire-protocol conformance case, loaded from a golden fixture file:
//   {"name", "method": "POST"|"GET", "path", "request": {...},
//    "echo_response": {...},   // optional: exact reply of an echo mock
//    "mock_response": {...}}   // optional: scripted mock reply, checked
//                              // against the schema like any other reply
struct ConformanceCase {
  std::string name;
  std::string method;
  std::string path;
  nlohmann::json request;
  std::optional<nlohmann::json> echo_response;
  std::optional<nlohmann::json> mock_response;
};

struct ConformanceResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<ConformanceCase> load_conformance_cases(const std::filesystem::path& file);
std::vector<ConformanceCase> parse_conformance_cases(const nlohmann::json& cases);

// Echo mock script answering every case that carries a mock_response.
MockScript conformance_script(const std::vector<ConformanceCase>& cases);

// Sends every case through `transport` and schema-checks the reply. With
// check_echo set, replies must also equal the recorded echo_response, or
// the mock_response when the case has one.
std::vector<ConformanceResult> run_conformance(Transport& transport,
                                               const std::vector<ConformanceCase>& cases,
                                               bool check_echo);

}  // namespace toddag
