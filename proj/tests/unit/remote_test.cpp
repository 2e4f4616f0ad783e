/*
 * Copyright 2026 MVRAG Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Remote-provider tests against a local HTTP server speaking the
// OpenAI-compatible wire format.

#include <atomic>
#include <cstdlib>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "mvrag/embedder.hpp"
#include "mvrag/error.hpp"
#include "mvrag/rerank.hpp"
#include "mvrag/rewriter.hpp"

// httplib's transitive <resolv.h> defines a `_res` macro that breaks Eigen,
// so it must come after the library headers.
#include "httplib.h"

using namespace mvrag;

namespace {

/// Minimal local endpoint for the embeddings and chat wire formats.
class LocalServer {
 public:
  LocalServer() {
    server_.Post("/v1/embeddings", [this](const httplib::Request& req,
                                          httplib::Response& res) {
      ++embedding_calls_;
      last_auth_ = req.get_header_value("Authorization");
      if (embedding_calls_ <= fail_first_) {
        res.status = 500;
        res.set_content("transient", "text/plain");
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json data = nlohmann::json::array();
      int index = 0;
      for (const auto& text : body.at("input")) {
        // a fixed tiny vector derived from the text length
        const double x = 1.0 + static_cast<double>(text.get<std::string>().size());
        nlohmann::json item;
        item["index"] = index++;
        item["embedding"] = {x, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        if (inconsistent_dims_ && index == 2) {
          item["embedding"] = {x, 1.0, 0.0};
        }
        data.push_back(item);
      }
      res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
    });

    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      ++chat_calls_;
      const auto body = nlohmann::json::parse(req.body);
      last_prompt_ = body.at("messages").at(0).at("content").get<std::string>();
      nlohmann::json reply = {
          {"choices",
           {{{"message", {{"role", "assistant"}, {"content", chat_reply_}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });

    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~LocalServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
  }

  void fail_first(int n) { fail_first_ = n; }
  void set_inconsistent_dims(bool v) { inconsistent_dims_ = v; }
  void set_chat_reply(std::string reply) { chat_reply_ = std::move(reply); }
  int embedding_calls() const { return embedding_calls_; }
  int chat_calls() const { return chat_calls_; }
  std::string last_auth() const { return last_auth_; }
  std::string last_prompt() const { return last_prompt_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> embedding_calls_{0};
  std::atomic<int> chat_calls_{0};
  int fail_first_ = 0;
  bool inconsistent_dims_ = false;
  std::string chat_reply_ = "ok";
  std::string last_auth_;
  std::string last_prompt_;
};

EmbedderConfig remote_embedder(const LocalServer& server) {
  EmbedderConfig config;
  config.provider = EmbedderProvider::remote;
  config.endpoint = server.endpoint();
  config.model = "test-embedder";
  config.retry_backoff_ms = 5;
  config.timeout_ms = 3000;
  return config;
}

RewriterConfig remote_chat(const LocalServer& server) {
  RewriterConfig config;
  config.provider = ChatProvider::remote;
  config.endpoint = server.endpoint();
  config.model = "test-chat";
  config.retry_backoff_ms = 5;
  config.timeout_ms = 3000;
  return config;
}

}  // namespace

TEST_CASE("remote embeddings batch, normalize and order by index") {
  LocalServer server;
  EmbedderConfig config = remote_embedder(server);
  config.batch_size = 2;

  const auto vectors = embed_texts({"aa", "bbbb", "cccccc"}, config);
  REQUIRE(vectors.size() == 3);
  CHECK(server.embedding_calls() == 2);  // two batches
  for (const auto& v : vectors) {
    CHECK(v.dim() == 8);
    CHECK(std::abs(v.values.norm() - 1.0) <= 1e-9);
  }
  // longer text -> larger first coordinate, distinct vectors per input
  CHECK(vectors[0].values[0] < vectors[1].values[0]);
  CHECK(vectors[1].values[0] < vectors[2].values[0]);
}

TEST_CASE("remote embeddings carry the bearer token from the environment") {
  LocalServer server;
  ::setenv("MVRAG_API_KEY", "sekrit", 1);
  embed_texts({"x"}, remote_embedder(server));
  CHECK(server.last_auth() == "Bearer sekrit");
  ::unsetenv("MVRAG_API_KEY");
}

TEST_CASE("remote embeddings retry transient failures") {
  LocalServer server;
  server.fail_first(2);
  const auto vectors = embed_texts({"x"}, remote_embedder(server));
  CHECK(vectors.size() == 1);
  CHECK(server.embedding_calls() == 3);  // 2 failures + 1 success
}

TEST_CASE("remote embeddings give up after the retry budget") {
  LocalServer server;
  server.fail_first(100);
  CHECK_THROWS_AS(embed_texts({"x"}, remote_embedder(server)), ProviderError);
  CHECK(server.embedding_calls() == 3);
}

TEST_CASE("remote embeddings reject inconsistent dimensions") {
  LocalServer server;
  server.set_inconsistent_dims(true);
  CHECK_THROWS_AS(embed_texts({"aa", "bb"}, remote_embedder(server)),
                  DimMismatchError);
}

TEST_CASE("chat_complete extracts the first choice") {
  LocalServer server;
  server.set_chat_reply("the reply text");
  const std::string out = chat_complete("hello", remote_chat(server));
  CHECK(out == "the reply text");
  CHECK(server.last_prompt() == "hello");
}

TEST_CASE("remote rewrite parses sections and falls back when one is missing") {
  LocalServer server;
  server.set_chat_reply(
      "1. Alpha: rewritten alpha content\n"
      "3. Gamma: rewritten gamma content\n");

  PerspectiveSet set;
  for (int i = 0; i < 3; ++i) {
    Perspective p;
    p.id = i;
    p.label = std::vector<std::string>{"Alpha", "Beta", "Gamma"}[i];
    set.perspectives.push_back(std::move(p));
  }
  PerspectiveVector vq;
  vq.weights = {0.9, 0.8, 0.7};

  const RewriteSet rewrites =
      rewrite("the query", vq, set, remote_chat(server));
  REQUIRE(rewrites.entries.size() == 3);
  CHECK(rewrites.entries[0].content == "rewritten alpha content");
  CHECK_FALSE(rewrites.entries[0].used_fallback);
  CHECK(rewrites.entries[1].content == "Beta: the query");  // fallback
  CHECK(rewrites.entries[1].used_fallback);
  CHECK(rewrites.entries[2].content == "rewritten gamma content");
  CHECK(server.chat_calls() == 1);  // single multi-section call
}

TEST_CASE("read_answer replays a recorded chat transcript") {
  LocalServer server;
  server.set_chat_reply("According to Reference [1], the answer is 42.");
  AssembledPrompt prompt;
  prompt.text = "Question: meaning?\nReference [1]: doc body\n";
  prompt.doc_ids = {"d42"};
  const std::string answer = read_answer(prompt, remote_chat(server));
  CHECK(answer == "According to Reference [1], the answer is 42.");
}
