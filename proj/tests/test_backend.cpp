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

#include <chrono>
#include <thread>

#include "oracles.hpp"
#include "toddag/backend.hpp"
#include "toddag/conformance.hpp"
#include "toddag/mock_backend.hpp"

using namespace toddag;
using nlohmann::json;

namespace {

BackendEndpoint quick_endpoint() {
  BackendEndpoint e;
  e.base_url = "http://127.0.0.1:1";
  e.backoff_ms = 0;
  return e;
}

struct Fixture {
  std::shared_ptr<MockBackend> mock;
  BackendClient client;
  explicit Fixture(MockScript script = {})
      : mock(std::make_shared<MockBackend>(std::move(script))), client(quick_endpoint(), mock) {}
};

}  // namespace

TEST(Client, RejectsBadRequestsBeforeSending) {
  Fixture f;
  EXPECT_THROW(f.client.fill_mask("a <mask> and <mask>", 5), RequestError);
  EXPECT_THROW(f.client.fill_mask("no mask here", 5), RequestError);
  EXPECT_THROW(f.client.fill_mask("a <mask>", 0), RequestError);
  EXPECT_THROW(f.client.paraphrase("hello", 0), RequestError);
  EXPECT_THROW(f.client.translate("hello", "", "fr"), RequestError);
  EXPECT_EQ(f.mock->attempts(), 0u);
}

TEST(Client, EchoDefaults) {
  Fixture f;
  EXPECT_TRUE(f.client.fill_mask("a <mask> hotel", 3).empty());
  EXPECT_EQ(f.client.paraphrase("hi there", 2), (std::vector<std::string>{"hi there", "hi there"}));
  EXPECT_EQ(f.client.translate("bonjour", "fr", "en"), "bonjour");
  const Prediction p = f.client.predict({}, "hello");
  EXPECT_EQ(p.state.size(), 0u);
  EXPECT_TRUE(p.acts.empty());
  EXPECT_EQ(f.client.health().status, "ok");
}

TEST(Client, ScriptedFillMaskKeepsOrder) {
  MockScript script;
  script.add("/v1/fill_mask", {{"text", "a <mask> hotel"}, {"mask_token", "<mask>"}, {"top_k", 2}},
             {{"candidates", {{{"token", "cheap"}, {"score", 0.9}}, {{"token", "nice"}, {"score", 0.1}}}}});
  Fixture f(script);
  EXPECT_EQ(f.client.fill_mask("a <mask> hotel", 2),
            (std::vector<MaskCandidate>{{"cheap", 0.9}, {"nice", 0.1}}));
}

TEST(Client, HandlersReplaceDefaults) {
  Fixture f;
  f.mock->set_handler("/v1/translate", [](const json& body) {
    auto w = oracle::words(body["text"].get<std::string>());
    std::string out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) out += (out.empty() ? "" : " ") + *it;
    return json{{"text", out}};
  });
  EXPECT_EQ(f.client.translate("a b c", "en", "fr"), "c b a");
  EXPECT_EQ(f.mock->executions("/v1/translate"), 1u);
}

TEST(Client, RetriesReuseTheRequestIdWithoutDuplicateEffects) {
  Fixture f;
  f.mock->drop_next_replies(1);
  f.mock->fail_next(1);
  EXPECT_EQ(f.client.translate("x", "en", "fr"), "x");
  EXPECT_EQ(f.mock->attempts(), 3u);
  EXPECT_EQ(f.mock->executions(), 1u);
  EXPECT_EQ(f.mock->request_ids().size(), 1u);  // distinct ids seen

  f.client.translate("y", "en", "fr");
  EXPECT_EQ(f.mock->request_ids().size(), 2u);
}

TEST(Client, RetryBudgetIsBounded) {
  Fixture f;
  f.mock->fail_next(3);
  EXPECT_THROW(f.client.chat("hello"), BackendError);
  EXPECT_EQ(f.mock->attempts(), 3u);  // first attempt plus two retries

  Fixture g;
  g.mock->fail_next(1, false, 400);
  EXPECT_THROW(g.client.chat("hello"), BackendError);
  EXPECT_EQ(g.mock->attempts(), 1u);
}

TEST(Client, EmptyChatReplyIsASchemaError) {
  MockScript script;
  script.fallback = MockDefault::kEmpty;
  Fixture f(script);
  EXPECT_THROW(f.client.chat("hello"), SchemaError);
}

TEST(Schema, Violations) {
  EXPECT_THROW(parse_fill_mask_response(json::object(), 3), SchemaError);
  EXPECT_THROW(parse_fill_mask_response({{"candidates", {{{"token", "a"}}}}}, 3), SchemaError);
  EXPECT_THROW(parse_fill_mask_response(
                   {{"candidates", {{{"token", "a"}, {"score", 0.1}}, {{"token", "b"}, {"score", 0.5}}}}}, 3),
               SchemaError);
  EXPECT_THROW(parse_fill_mask_response({{"candidates", {{{"token", "a"}, {"score", 1.5}}}}}, 3),
               SchemaError);
  EXPECT_THROW(parse_fill_mask_response(
                   {{"candidates", {{{"token", "a"}, {"score", 0.5}}, {{"token", "b"}, {"score", 0.4}}}}}, 1),
               SchemaError);
  EXPECT_THROW(parse_paraphrase_response({{"paraphrases", {"a", "b"}}}, 1), SchemaError);
  EXPECT_THROW(parse_paraphrase_response({{"paraphrases", {1}}}, 1), SchemaError);
  EXPECT_THROW(parse_translate_response({{"text", 3}}), SchemaError);
  EXPECT_THROW(parse_predict_response({{"state", {{"hotel", {{"area", 1}}}}}, {"acts", json::array()}}),
               SchemaError);
  EXPECT_THROW(parse_predict_response({{"state", json::object()}, {"acts", {{{"act", "inform"}}}}}),
               SchemaError);
  const Prediction p = parse_predict_response(
      {{"state", {{"hotel", {{"area", "north"}}}, {"taxi", json::object()}}},
       {"acts", {{{"act", "inform"}, {"domain", "hotel"}, {"slot", "area"}}}}});
  EXPECT_EQ(p.state.size(), 1u);
  EXPECT_EQ(p.acts.size(), 1u);
}

TEST(Client, InFlightIsBounded) {
  auto mock = std::make_shared<MockBackend>();
  mock->set_handler("/v1/translate", [](const json& body) {
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    return json{{"text", body["text"]}};
  });
  BackendEndpoint e = quick_endpoint();
  e.max_in_flight = 2;
  BackendClient client(e, mock);
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 5; ++i) client.translate("x", "en", "fr");
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(client.peak_in_flight(), 2);
  EXPECT_EQ(mock->executions(), 30u);
}

TEST(Http, ConformanceAgainstServedMock) {
  const auto cases = load_conformance_cases(oracle::data_path("conformance/cases.json"));
  auto mock = std::make_shared<MockBackend>(conformance_script(cases));
  MockHttpServer server(mock);
  BackendEndpoint e = quick_endpoint();
  e.base_url = server.base_url();
  HttpTransport transport(e);
  for (const auto& r : run_conformance(transport, cases, true)) {
    EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
  }
  BackendClient client(e);
  EXPECT_EQ(client.paraphrase("hello", 1), std::vector<std::string>{"hello"});
}

TEST(Http, ConformanceCatchesAWrongReply) {
  const auto cases = load_conformance_cases(oracle::data_path("conformance/cases.json"));
  auto mock = std::make_shared<MockBackend>(conformance_script(cases));
  mock->set_handler("/v1/paraphrase", [](const json&) { return json{{"paraphrases", "oops"}}; });
  std::size_t failed = 0;
  for (const auto& r : run_conformance(*mock, cases, true)) failed += r.passed ? 0 : 1;
  EXPECT_EQ(failed, 2u);
}

TEST(Http, TimeoutsExhaustTheRetryBudget) {
  auto mock = std::make_shared<MockBackend>();
  mock->set_handler("/v1/chat", [](const json&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    return json{{"text", "late"}};
  });
  MockHttpServer server(mock);
  BackendEndpoint e = quick_endpoint();
  e.base_url = server.base_url();
  e.timeout_ms = 100;
  e.retry_budget = 1;
  BackendClient client(e);
  EXPECT_THROW(client.chat("hello"), BackendError);
}

TEST(Http, UnreachableBackend) {
  BackendEndpoint e = quick_endpoint();
  e.retry_budget = 0;
  e.timeout_ms = 200;
  BackendClient client(e);
  EXPECT_THROW(client.chat("hello"), BackendError);
}
