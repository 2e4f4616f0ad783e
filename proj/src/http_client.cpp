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

#include "http_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "mvrag/error.hpp"

namespace mvrag::internal {

namespace {

// Splits "http://host:port/base" into the client origin and the base path.
void split_endpoint(const std::string& endpoint, std::string& origin,
                    std::string& base_path) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError("endpoint must include a scheme: " + endpoint);
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    origin = endpoint;
    base_path.clear();
  } else {
    origin = endpoint.substr(0, path_start);
    base_path = endpoint.substr(path_start);
    while (!base_path.empty() && base_path.back() == '/') base_path.pop_back();
  }
}

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

nlohmann::json post_json(const HttpRequestOptions& options,
                         const nlohmann::json& body) {
  if (options.endpoint.empty()) {
    throw ProviderError("remote provider requested but no endpoint configured");
  }
  std::string origin;
  std::string base_path;
  split_endpoint(options.endpoint, origin, base_path);

  httplib::Client client(origin);
  client.set_connection_timeout(0, options.timeout_ms * 1000LL);
  client.set_read_timeout(options.timeout_ms / 1000, (options.timeout_ms % 1000) * 1000);
  client.set_write_timeout(options.timeout_ms / 1000, (options.timeout_ms % 1000) * 1000);

  httplib::Headers headers;
  if (!options.api_key_env.empty()) {
    if (const char* key = std::getenv(options.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  const std::string path = base_path + options.path;
  const std::string payload = body.dump();
  std::string last_error;

  const int attempts = std::max(1, options.max_retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      const auto backoff =
          std::chrono::milliseconds(options.retry_backoff_ms << (attempt - 1));
      std::this_thread::sleep_for(backoff);
    }
    auto result = client.Post(path, headers, payload, "application/json");
    if (!result) {
      last_error = "connection failed: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 200 && result->status < 300) {
      try {
        return nlohmann::json::parse(result->body);
      } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("invalid JSON response: ") + e.what());
      }
    }
    last_error = "HTTP " + std::to_string(result->status) + ": " + result->body;
    if (!retryable_status(result->status)) break;
  }
  throw ProviderError("request to " + origin + path + " failed after retries (" +
                      last_error + ")");
}

}  // namespace mvrag::internal
