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

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "toddag/corpus.hpp"
#include "toddag/error.hpp"

namespace toddag {

struct BackendEndpoint {
  std::string base_url;          // e.g. "http://127.0.0.1:8080"
  int timeout_ms = 30000;
  int retry_budget = 2;          // retries after the first attempt
  int max_in_flight = 4;
  int backoff_ms = 200;          // doubled after every failed attempt
  std::string bearer_token;      // passed through as "Authorization: Bearer"
  std::string mask_token = "<mask>";

  void validate() const;
};

// Transport-level failure. Retryable failures (connection errors, timeouts,
// 5xx) are retried by BackendClient; others are not.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, bool retryable, int status = 0)
      : Error(message), retryable_(retryable), status_(status) {}
  bool retryable() const { return retryable_; }
  int status() const { return status_; }

 private:
  bool retryable_;
  int status_;
};

// The backend answered but the payload does not match the wire schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A request that violates a client-side precondition; never sent.
class RequestError : public Error {
 public:
  using Error::Error;
};

// Raised once the retry budget is exhausted.
class BackendError : public Error {
 public:
  using Error::Error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // request_id is identical across retries of one logical request.
  virtual nlohmann::json post(std::string_view path, const nlohmann::json& body,
                              std::string_view request_id) = 0;
  virtual nlohmann::json get(std::string_view path) = 0;
};

// JSON over HTTP via cpp-httplib. The request id travels in X-Request-Id.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(BackendEndpoint endpoint);
  nlohmann::json post(std::string_view path, const nlohmann::json& body,
                      std::string_view request_id) override;
  nlohmann::json get(std::string_view path) override;

 private:
  BackendEndpoint endpoint_;
};

struct MaskCandidate {
  std::string token;
  double score = 0.0;

  bool operator==(const MaskCandidate&) const = default;
};

struct Prediction {
  DialogState state;
  std::vector<SystemAct> acts;
};

struct HealthStatus {
  std::string status;
  std::vector<std::string> capabilities;
};

// Counting gate bounding concurrent requests.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int limit) : limit_(limit) {}
  void acquire();
  void release();
  int peak() const { return peak_; }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int limit_;
  int active_ = 0;
  int peak_ = 0;
};

// Client for the /v1 model-backend protocol. Shareable across threads.
// Every response is schema-checked before it is returned.
class BackendClient {
 public:
  BackendClient(BackendEndpoint endpoint, std::shared_ptr<Transport> transport);
  // HTTP transport built from endpoint.base_url.
  explicit BackendClient(BackendEndpoint endpoint);

  // POST /v1/fill_mask. `text` must contain exactly one mask token.
  std::vector<MaskCandidate> fill_mask(std::string_view text, std::size_t top_k);
  // POST /v1/paraphrase. n >= 1.
  std::vector<std::string> paraphrase(std::string_view text, std::size_t n);
  // POST /v1/translate.
  std::string translate(std::string_view text, std::string_view src, std::string_view tgt);
  // POST /v1/chat. An empty reply is a SchemaError.
  std::string chat(std::string_view prompt);
  // POST /v1/predict.
  Prediction predict(const std::vector<std::string>& context, std::string_view utterance);
  // GET /v1/health.
  HealthStatus health();

  const BackendEndpoint& endpoint() const { return endpoint_; }
  int peak_in_flight() const { return limiter_.peak(); }

 private:
  nlohmann::json call(std::string_view path, const nlohmann::json& body);
  std::string next_request_id();

  BackendEndpoint endpoint_;
  std::shared_ptr<Transport> transport_;
  InFlightLimiter limiter_;
  std::string id_prefix_;
  std::atomic<std::uint64_t> counter_{0};
};

// Schema validators shared by the client and the conformance suite. Each
// throws SchemaError describing the first violation.
std::vector<MaskCandidate> parse_fill_mask_response(const nlohmann::json& body,
                                                    std::size_t top_k);
std::vector<std::string> parse_paraphrase_response(const nlohmann::json& body,
                                                   std::size_t n);
std::string parse_translate_response(const nlohmann::json& body);
std::string parse_chat_response(const nlohmann::json& body);
Prediction parse_predict_response(const nlohmann::json& body);
HealthStatus parse_health_response(const nlohmann::json& body);

nlohmann::json state_to_json(const DialogState& state);
nlohmann::json acts_to_json(const std::vector<SystemAct>& acts);

}  // namespace toddag
