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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "toddag/backend.hpp"

namespace toddag {

// What a mock does with a request that has no scripted response.
//   kEcho:  fill_mask -> no candidates, paraphrase -> n copies of the text,
//           translate -> the text, chat -> the prompt's sentence twice on two
//           lines, predict -> empty state and no acts.
//   kEmpty: empty candidate/paraphrase lists, empty text, empty prediction.
//   kError: HTTP 500.
enum class MockDefault { kEcho, kEmpty, kError };

// Canonical key of a request: path plus the compact JSON body (object keys
// are sorted, so equal requests give equal fingerprints).
std::string request_fingerprint(std::string_view path, const nlohmann::json& body);

struct MockScript {
  std::map<std::string, nlohmann::json> responses;  // fingerprint -> body
  MockDefault fallback = MockDefault::kEcho;

  void add(std::string_view path, const nlohmann::json& request,
           nlohmann::json response) {
    responses[request_fingerprint(path, request)] = std::move(response);
  }
};

// In-process backend speaking the /v1 protocol. Thread-safe.
//
// Responses are cached per request id: a retried request is answered from
// the cache and does not run its handler again, which lets tests check that
// retries never duplicate side effects.
class MockBackend : public Transport {
 public:
  using Handler = std::function<nlohmann::json(const nlohmann::json& body)>;

  explicit MockBackend(MockScript script = {});

  // Overrides both script and default for one path, e.g. "/v1/translate".
  void set_handler(std::string path, Handler handler);

  // The next n attempts fail before reaching the handler.
  void fail_next(int n, bool retryable = true, int status = 503);
  // The next n requests are processed, then the reply is "lost" (a
  // retryable failure is raised after the side effect).
  void drop_next_replies(int n);

  nlohmann::json post(std::string_view path, const nlohmann::json& body,
                      std::string_view request_id) override;
  nlohmann::json get(std::string_view path) override;

  // Handler executions (side effects), attempts seen, and distinct ids.
  std::size_t executions() const;
  std::size_t attempts() const;
  std::size_t executions(std::string_view path) const;
  std::vector<std::string> request_ids() const;

  std::vector<std::string> capabilities() const;

 private:
  nlohmann::json dispatch(std::string_view path, const nlohmann::json& body);

  mutable std::mutex mutex_;
  MockScript script_;
  std::map<std::string, Handler, std::less<>> handlers_;
  std::map<std::string, nlohmann::json> reply_cache_;
  std::map<std::string, std::size_t, std::less<>> executions_by_path_;
  std::vector<std::string> request_ids_;
  std::size_t executions_ = 0;
  std::size_t attempts_ = 0;
  int fail_remaining_ = 0;
  bool fail_retryable_ = true;
  int fail_status_ = 503;
  int drop_remaining_ = 0;
};

// Echo reply for one /v1 call, shared by MockBackend and the conformance
// goldens.
nlohmann::json echo_response(std::string_view path, const nlohmann::json& body);
nlohmann::json empty_response(std::string_view path);

// Serves a MockBackend over HTTP on 127.0.0.1 from a background thread.
class MockHttpServer {
 public:
  // port 0 picks a free port.
  explicit MockHttpServer(std::shared_ptr<MockBackend> backend, int port = 0);
  ~MockHttpServer();
  MockHttpServer(const MockHttpServer&) = delete;
  MockHttpServer& operator=(const MockHttpServer&) = delete;

  int port() const { return port_; }
  std::string base_url() const;
  // Blocks until stop() is called from another thread.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace toddag
