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

#include "toddag/backend.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <thread>

#include "httplib.h"
#include "toddag/text.hpp"

namespace toddag {

using nlohmann::json;

void BackendEndpoint::validate() const {
  if (retry_budget < 0) throw RequestError("retry budget must be >= 0");
  if (max_in_flight < 1) throw RequestError("max in-flight requests must be >= 1");
  if (timeout_ms < 1) throw RequestError("timeout must be >= 1 ms");
  if (mask_token.empty()) throw RequestError("mask token must not be empty");
}

// ---------------------------------------------------------------------------

HttpTransport::HttpTransport(BackendEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.base_url.empty()) throw RequestError("backend base URL is empty");
}

namespace {

httplib::Client make_client(const BackendEndpoint& endpoint) {
  httplib::Client client(endpoint.base_url);
  const auto sec = endpoint.timeout_ms / 1000;
  const auto usec = (endpoint.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  if (!endpoint.bearer_token.empty()) {
    client.set_bearer_token_auth(endpoint.bearer_token);
  }
  return client;
}

json decode(const httplib::Result& result, std::string_view path) {
  if (!result) {
    throw TransportError(std::string(path) + ": " + httplib::to_string(result.error()),
                         /*retryable=*/true);
  }
  const int status = result->status;
  if (status >= 500 || status == 429 || status == 408) {
    throw TransportError(std::string(path) + ": HTTP " + std::to_string(status) + " " +
                             result->body,
                         /*retryable=*/true, status);
  }
  if (status != 200) {
    throw TransportError(std::string(path) + ": HTTP " + std::to_string(status) + " " +
                             result->body,
                         /*retryable=*/false, status);
  }
  try {
    return json::parse(result->body);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string(path) + ": response is not JSON: " + e.what());
  }
}

}  // namespace

json HttpTransport::post(std::string_view path, const json& body,
                         std::string_view request_id) {
  auto client = make_client(endpoint_);
  httplib::Headers headers = {{"X-Request-Id", std::string(request_id)}};
  auto result = client.Post(std::string(path), headers, body.dump(), "application/json");
  return decode(result, path);
}

json HttpTransport::get(std::string_view path) {
  auto client = make_client(endpoint_);
  return decode(client.Get(std::string(path)), path);
}

// ---------------------------------------------------------------------------

void InFlightLimiter::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return active_ < limit_; });
  ++active_;
  peak_ = std::max(peak_, active_);
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mutex_);
    --active_;
  }
  cv_.notify_one();
}

namespace {

struct LimiterGuard {
  explicit LimiterGuard(InFlightLimiter& l) : limiter(l) { limiter.acquire(); }
  ~LimiterGuard() { limiter.release(); }
  InFlightLimiter& limiter;
};

std::string random_prefix() {
  std::random_device rd;
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%08x%08x", rd(), rd());
  return buffer;
}

}  // namespace

BackendClient::BackendClient(BackendEndpoint endpoint, std::shared_ptr<Transport> transport)
    : endpoint_(std::move(endpoint)),
      transport_(std::move(transport)),
      limiter_(endpoint_.max_in_flight),
      id_prefix_(random_prefix()) {
  endpoint_.validate();
  if (!transport_) throw RequestError("backend client needs a transport");
}

BackendClient::BackendClient(BackendEndpoint endpoint)
    : BackendClient(endpoint, std::make_shared<HttpTransport>(endpoint)) {}

std::string BackendClient::next_request_id() {
  return id_prefix_ + "-" + std::to_string(counter_.fetch_add(1));
}

json BackendClient::call(std::string_view path, const json& body) {
  const std::string request_id = next_request_id();
  LimiterGuard guard(limiter_);
  int backoff = endpoint_.backoff_ms;
  for (int attempt = 0;; ++attempt) {
    try {
      return transport_->post(path, body, request_id);
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= endpoint_.retry_budget) {
        throw BackendError(std::string(path) + " failed after " +
                           std::to_string(attempt + 1) + " attempt(s): " + e.what());
      }
    }
    if (backoff > 0) std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
    backoff *= 2;
  }
}

std::vector<MaskCandidate> BackendClient::fill_mask(std::string_view text, std::size_t top_k) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(endpoint_.mask_token); pos != std::string_view::npos;
       pos = text.find(endpoint_.mask_token, pos + endpoint_.mask_token.size())) {
    ++count;
  }
  if (count != 1) {
    throw RequestError("fill_mask needs exactly one mask token '" + endpoint_.mask_token +
                       "', found " + std::to_string(count));
  }
  if (top_k == 0) throw RequestError("fill_mask: top_k must be >= 1");
  const json body = {{"text", text}, {"mask_token", endpoint_.mask_token}, {"top_k", top_k}};
  return parse_fill_mask_response(call("/v1/fill_mask", body), top_k);
}

std::vector<std::string> BackendClient::paraphrase(std::string_view text, std::size_t n) {
  if (n == 0) throw RequestError("paraphrase: n must be >= 1");
  const json body = {{"text", text}, {"n", n}};
  return parse_paraphrase_response(call("/v1/paraphrase", body), n);
}

std::string BackendClient::translate(std::string_view text, std::string_view src,
                                     std::string_view tgt) {
  if (src.empty() || tgt.empty()) throw RequestError("translate: empty language code");
  const json body = {{"text", text}, {"src", src}, {"tgt", tgt}};
  return parse_translate_response(call("/v1/translate", body));
}

std::string BackendClient::chat(std::string_view prompt) {
  const json body = {{"prompt", prompt}};
  return parse_chat_response(call("/v1/chat", body));
}

Prediction BackendClient::predict(const std::vector<std::string>& context,
                                  std::string_view utterance) {
  const json body = {{"context", context}, {"utterance", utterance}};
  return parse_predict_response(call("/v1/predict", body));
}

HealthStatus BackendClient::health() {
  LimiterGuard guard(limiter_);
  try {
    return parse_health_response(transport_->get("/v1/health"));
  } catch (const TransportError& e) {
    throw BackendError(std::string("/v1/health failed: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Schema validation.

namespace {

const json& require(const json& body, const char* key, const char* what) {
  if (!body.is_object() || !body.contains(key)) {
    throw SchemaError(std::string(what) + ": missing field '" + key + "'");
  }
  return body.at(key);
}

}  // namespace

std::vector<MaskCandidate> parse_fill_mask_response(const json& body, std::size_t top_k) {
  const json& candidates = require(body, "candidates", "fill_mask");
  if (!candidates.is_array()) throw SchemaError("fill_mask: 'candidates' is not an array");
  if (candidates.size() > top_k) {
    throw SchemaError("fill_mask: " + std::to_string(candidates.size()) +
                      " candidates exceed top_k=" + std::to_string(top_k));
  }
  std::vector<MaskCandidate> out;
  for (const auto& c : candidates) {
    const json& token = require(c, "token", "fill_mask candidate");
    const json& score = require(c, "score", "fill_mask candidate");
    if (!token.is_string()) throw SchemaError("fill_mask: candidate token is not a string");
    if (!score.is_number()) throw SchemaError("fill_mask: candidate score is not a number");
    const double s = score.get<double>();
    if (!(s >= 0.0 && s <= 1.0)) throw SchemaError("fill_mask: score outside [0, 1]");
    if (!out.empty() && s > out.back().score) {
      throw SchemaError("fill_mask: candidates not sorted by score descending");
    }
    out.push_back({token.get<std::string>(), s});
  }
  return out;
}

std::vector<std::string> parse_paraphrase_response(const json& body, std::size_t n) {
  const json& list = require(body, "paraphrases", "paraphrase");
  if (!list.is_array()) throw SchemaError("paraphrase: 'paraphrases' is not an array");
  if (list.size() > n) {
    throw SchemaError("paraphrase: " + std::to_string(list.size()) +
                      " paraphrases exceed n=" + std::to_string(n));
  }
  std::vector<std::string> out;
  for (const auto& p : list) {
    if (!p.is_string()) throw SchemaError("paraphrase: entry is not a string");
    out.push_back(p.get<std::string>());
  }
  return out;
}

std::string parse_translate_response(const json& body) {
  const json& text = require(body, "text", "translate");
  if (!text.is_string()) throw SchemaError("translate: 'text' is not a string");
  return text.get<std::string>();
}

std::string parse_chat_response(const json& body) {
  const json& text = require(body, "text", "chat");
  if (!text.is_string()) throw SchemaError("chat: 'text' is not a string");
  std::string reply = text.get<std::string>();
  if (normalize_text(reply).empty()) throw SchemaError("chat: empty reply");
  return reply;
}

Prediction parse_predict_response(const json& body) {
  Prediction out;
  const json& state = require(body, "state", "predict");
  if (!state.is_object()) throw SchemaError("predict: 'state' is not an object");
  for (const auto& [domain, slots] : state.items()) {
    if (!slots.is_object()) throw SchemaError("predict: state." + domain + " is not an object");
    for (const auto& [slot, value] : slots.items()) {
      if (!value.is_string()) {
        throw SchemaError("predict: state." + domain + "." + slot + " is not a string");
      }
      out.state.slots[domain][slot] = value.get<std::string>();
    }
  }
  std::erase_if(out.state.slots, [](const auto& kv) { return kv.second.empty(); });
  const json& acts = require(body, "acts", "predict");
  if (!acts.is_array()) throw SchemaError("predict: 'acts' is not an array");
  for (const auto& a : acts) {
    const json& act = require(a, "act", "predict act");
    const json& domain = require(a, "domain", "predict act");
    if (!act.is_string() || !domain.is_string()) {
      throw SchemaError("predict: act fields must be strings");
    }
    std::string slot;
    if (a.contains("slot")) {
      if (!a["slot"].is_string()) throw SchemaError("predict: act slot must be a string");
      slot = a["slot"].get<std::string>();
    }
    out.acts.push_back({act.get<std::string>(), domain.get<std::string>(), slot});
  }
  return out;
}

HealthStatus parse_health_response(const json& body) {
  const json& status = require(body, "status", "health");
  const json& caps = require(body, "capabilities", "health");
  if (!status.is_string() || status.get<std::string>() != "ok") {
    throw SchemaError("health: status is not \"ok\"");
  }
  if (!caps.is_array()) throw SchemaError("health: 'capabilities' is not an array");
  HealthStatus out{"ok", {}};
  for (const auto& c : caps) {
    if (!c.is_string()) throw SchemaError("health: capability is not a string");
    out.capabilities.push_back(c.get<std::string>());
  }
  return out;
}

json state_to_json(const DialogState& state) {
  json obj = json::object();
  for (const auto& [domain, slots] : state.slots) {
    for (const auto& [slot, value] : slots) obj[domain][slot] = value;
  }
  return obj;
}

json acts_to_json(const std::vector<SystemAct>& acts) {
  json arr = json::array();
  for (const auto& a : acts) {
    arr.push_back({{"act", a.act}, {"domain", a.domain}, {"slot", a.slot}});
  }
  return arr;
}

}  // namespace toddag
