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

#include "toddag/conformance.hpp"

#include "toddag/corpus.hpp"

namespace toddag {

using nlohmann::json;

std::vector<ConformanceCase> parse_conformance_cases(const json& cases) {
  if (!cases.is_array()) throw Error("conformance fixture: top level must be an array");
  std::vector<ConformanceCase> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const json& c = cases[i];
    const std::string where = "conformance case " + std::to_string(i);
    if (!c.is_object() || !c.contains("name") || !c.contains("path")) {
      throw Error(where + ": needs 'name' and 'path'");
    }
    ConformanceCase item;
    item.name = c["name"].get<std::string>();
    item.method = c.value("method", "POST");
    item.path = c["path"].get<std::string>();
    item.request = c.value("request", json::object());
    if (c.contains("echo_response")) item.echo_response = c["echo_response"];
    if (c.contains("mock_response")) item.mock_response = c["mock_response"];
    if (item.method != "POST" && item.method != "GET") {
      throw Error(where + ": method must be POST or GET");
    }
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<ConformanceCase> load_conformance_cases(const std::filesystem::path& file) {
  try {
    return parse_conformance_cases(json::parse(read_file(file)));
  } catch (const json::exception& e) {
    throw Error(file.string() + ": " + e.what());
  }
}

MockScript conformance_script(const std::vector<ConformanceCase>& cases) {
  MockScript script;
  for (const auto& c : cases) {
    if (c.mock_response) script.add(c.path, c.request, *c.mock_response);
  }
  return script;
}

namespace {

void check_schema(const ConformanceCase& c, const json& reply) {
  const auto& path = c.path;
  if (path == "/v1/fill_mask") {
    parse_fill_mask_response(reply, c.request.value("top_k", std::size_t{1}));
  } else if (path == "/v1/paraphrase") {
    parse_paraphrase_response(reply, c.request.value("n", std::size_t{1}));
  } else if (path == "/v1/translate") {
    parse_translate_response(reply);
  } else if (path == "/v1/chat") {
    parse_chat_response(reply);
  } else if (path == "/v1/predict") {
    parse_predict_response(reply);
  } else if (path == "/v1/health") {
    if (parse_health_response(reply).capabilities.empty()) {
      throw SchemaError("health: no capabilities advertised");
    }
  } else {
    throw SchemaError("no schema for path " + path);
  }
}

}  // namespace

std::vector<ConformanceResult> run_conformance(Transport& transport,
                                               const std::vector<ConformanceCase>& cases,
                                               bool check_echo) {
  std::vector<ConformanceResult> results;
  std::size_t id = 0;
  for (const auto& c : cases) {
    ConformanceResult r{c.name, false, {}};
    try {
      const json reply =
          c.method == "GET"
              ? transport.get(c.path)
              : transport.post(c.path, c.request, "conformance-" + std::to_string(id++));
      check_schema(c, reply);
      const auto& golden = c.mock_response ? c.mock_response : c.echo_response;
      if (check_echo && golden && reply != *golden) {
        r.detail = "reply " + reply.dump() + " differs from golden " + golden->dump();
      } else {
        r.passed = true;
        r.detail = "ok";
      }
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace toddag
