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

// Internal helper shared by the remote embedding and chat clients.

#pragma once

#include <string>

#include "json.hpp"

namespace mvrag::internal {

struct HttpRequestOptions {
  std::string endpoint;     // scheme://host[:port][/base/path]
  std::string path;         // appended to the endpoint's base path
  std::string api_key_env;  // bearer token read from this env var, if set
  int timeout_ms = 30000;
  int max_retries = 3;
  int retry_backoff_ms = 500;
};

/// POSTs `body` as JSON and returns the parsed JSON response. Retries
/// connection failures and 5xx/429 responses with exponential backoff,
/// then throws ProviderError.
nlohmann::json post_json(const HttpRequestOptions& options,
                         const nlohmann::json& body);

}  // namespace mvrag::internal
