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

#include "toddag/mock_backend.hpp"

#include <algorithm>

#include "httplib.h"

namespace toddag {

using nlohmann::json;

namespace {

constexpr std::string_view kSentenceMarker = "The sentence to paraphrase is : ";

const std::vector<std::string> kCapabilities = {"fill_mask", "paraphrase", "translate",
                                                "chat", "predict"};

std::string text_field(const json& body, const char* key) {
  if (body.is_object() && body.contains(key) && body[key].is_string()) {
    return body[key].get<std::string>();
  }
  return {};
}

}  // namespace

std::string request_fingerprint(std::string_view path, const json& body) {
  return std::string(path) + " " + body.dump();
}

json echo_response(std::string_view path, const json& body) {
  if (path == "/v1/fill_mask") return {{"candidates", json::array()}};
  if (path == "/v1/paraphrase") {
    std::size_t n = 1;
    if (body.contains("n") && body["n"].is_number_unsigned()) n = body["n"].get<std::size_t>();
    return {{"paraphrases", std::vector<std::string>(n, text_field(body, "text"))}};
  }
  if (path == "/v1/translate") return {{"text", text_field(body, "text")}};
  if (path == "/v1/chat") {
    std::string prompt = text_field(body, "prompt");
    const auto at = prompt.find(kSentenceMarker);
    const std::string sentence =
        at == std::string::npos ? prompt : prompt.substr(at + kSentenceMarker.size());
    return {{"text", sentence + "\n" + sentence}};
  }
  if (path == "/v1/predict") return {{"state", json::object()}, {"acts", json::array()}};
  throw TransportError("mock: unknown path " + std::string(path), false, 404);
}

json empty_response(std::string_view path) {
  if (path == "/v1/fill_mask") return {{"candidates", json::array()}};
  if (path == "/v1/paraphrase") return {{"paraphrases", json::array()}};
  if (path == "/v1/translate" || path == "/v1/chat") return {{"text", ""}};
  if (path == "/v1/predict") return {{"state", json::object()}, {"acts", json::array()}};
  throw TransportError("mock: unknown path " + std::string(path), false, 404);
}

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {}

void MockBackend::set_handler(std::string path, Handler handler) {
  std::lock_guard lock(mutex_);
  handlers_[std::move(path)] = std::move(handler);
}

void MockBackend::fail_next(int n, bool retryable, int status) {
  std::lock_guard lock(mutex_);
  fail_remaining_ = n;
  fail_retryable_ = retryable;
  fail_status_ = status;
}

void MockBackend::drop_next_replies(int n) {
  std::lock_guard lock(mutex_);
  drop_remaining_ = n;
}

json MockBackend::dispatch(std::string_view path, const json& body) {
  if (auto h = handlers_.find(path); h != handlers_.end()) return h->second(body);
  if (auto s = script_.responses.find(request_fingerprint(path, body));
      s != script_.responses.end()) {
    return s->second;
  }
  switch (script_.fallback) {
    case MockDefault::kEcho:
      return echo_response(path, body);
    case MockDefault::kEmpty:
      return empty_response(path);
    case MockDefault::kError:
      break;
  }
  throw TransportError("mock: scripted failure for " + std::string(path), true, 500);
}

json MockBackend::post(std::string_view path, const json& body, std::string_view request_id) {
  std::lock_guard lock(mutex_);
  ++attempts_;
  if (fail_remaining_ > 0) {
    --fail_remaining_;
    throw TransportError("mock: injected failure", fail_retryable_, fail_status_);
  }
  const std::string id(request_id);
  if (auto cached = reply_cache_.find(id); cached != reply_cache_.end()) {
    return cached->second;
  }
  json reply = dispatch(path, body);
  ++executions_;
  ++executions_by_path_[std::string(path)];
  request_ids_.push_back(id);
  reply_cache_[id] = reply;
  if (drop_remaining_ > 0) {
    --drop_remaining_;
    throw TransportError("mock: reply lost after processing", true, 503);
  }
  return reply;
}

json MockBackend::get(std::string_view path) {
  std::lock_guard lock(mutex_);
  ++attempts_;
  if (path != "/v1/health") {
    throw TransportError("mock: unknown path " + std::string(path), false, 404);
  }
  return {{"status", "ok"}, {"capabilities", kCapabilities}};
}

std::size_t MockBackend::executions() const {
  std::lock_guard lock(mutex_);
  return executions_;
}

std::size_t MockBackend::attempts() const {
  std::lock_guard lock(mutex_);
  return attempts_;
}

std::size_t MockBackend::executions(std::string_view path) const {
  std::lock_guard lock(mutex_);
  auto it = executions_by_path_.find(path);
  return it == executions_by_path_.end() ? 0 : it->second;
}

std::vector<std::string> MockBackend::request_ids() const {
  std::lock_guard lock(mutex_);
  return request_ids_;
}

std::vector<std::string> MockBackend::capabilities() const { return kCapabilities; }

// ---------------------------------------------------------------------------

struct MockHttpServer::Impl {
  httplib::Server server;
  std::thread thread;
};

MockHttpServer::MockHttpServer(std::shared_ptr<MockBackend> backend, int port)
    : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  server.Post(R"(/v1/(\w+))", [backend](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      return;
    }
    try {
      const json reply = backend->post(req.path, body, req.get_header_value("X-Request-Id"));
      res.set_content(reply.dump(), "application/json");
    } catch (const TransportError& e) {
      res.status = e.status() == 0 ? 500 : e.status();
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });
  server.Get("/v1/health", [backend](const httplib::Request&, httplib::Response& res) {
    res.set_content(backend->get("/v1/health").dump(), "application/json");
  });
  if (port == 0) {
    port_ = server.bind_to_any_port("127.0.0.1");
  } else {
    port_ = server.bind_to_port("127.0.0.1", port) ? port : -1;
  }
  if (port_ <= 0) throw Error("mock server: cannot bind 127.0.0.1:" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockHttpServer::~MockHttpServer() { stop(); }

std::string MockHttpServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

void MockHttpServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void MockHttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace toddag
