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

#pragma once

#include <string>
#include <vector>

#include "mvrag/intent.hpp"
#include "mvrag/perspectives.hpp"

namespace mvrag {

enum class ChatProvider { mock, remote };

struct RewriterConfig {
  ChatProvider provider = ChatProvider::mock;
  std::string endpoint;  // OpenAI-compatible chat completions base URL
  std::string model;
  std::string api_key_env = "MVRAG_API_KEY";
  double temperature = 0.0;
  int max_tokens = 1024;
  int timeout_ms = 60000;
  int max_retries = 3;
  int retry_backoff_ms = 500;

  /// When set, issues one model call per active perspective instead of a
  /// single multi-section call.
  bool per_perspective_calls = false;
};

struct RewriteEntry {
  int perspective_id = 0;
  std::string label;
  std::string content;        // C_i, the pseudo-answer section body
  bool used_fallback = false;  // section missing from the model output
};

struct RewriteSet {
  std::vector<RewriteEntry> entries;  // one per active perspective, V_q order
  std::string prompt;                 // prompt(s) sent to the model
  std::string raw_output;             // unparsed model output
};

/// Renders the rewriting prompt: expert preamble, the input query, the list
/// of perspectives, and one numbered section header per active perspective.
std::string build_rewrite_prompt(const std::string& query,
                                 const std::vector<Perspective>& active);

/// Splits a pseudo-answer document into per-label section bodies by matching
/// numbered "<n>. <label>:" headers. Sections missing from the output come
/// back empty and are flagged in `missing`.
std::vector<std::string> parse_rewrite_sections(
    const std::string& output, const std::vector<std::string>& labels,
    std::vector<bool>* missing = nullptr);

/// Deterministic stand-in for the remote rewriter: each section body is
/// "<label> :: <query> :: <label tokens>".
std::string mock_rewrite_output(const std::string& query,
                                const std::vector<Perspective>& active);

/// Rewrites the query once per active perspective of V_q. Sections the model
/// failed to produce fall back to "<label>: <query>" and are flagged.
RewriteSet rewrite(const std::string& query, const PerspectiveVector& vq,
                   const PerspectiveSet& set, const RewriterConfig& config);

/// Single chat-completion call against the configured remote endpoint.
std::string chat_complete(const std::string& prompt,
                          const RewriterConfig& config);

}  // namespace mvrag
