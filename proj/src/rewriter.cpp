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

#include "mvrag/rewriter.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "http_client.hpp"
#include "mvrag/error.hpp"

namespace mvrag {

std::string build_rewrite_prompt(const std::string& query,
                                 const std::vector<Perspective>& active) {
  if (active.empty()) {
    throw InvalidArgumentError("build_rewrite_prompt: no active perspectives");
  }
  std::ostringstream out;
  out << "You are a domain expert specializing in analyzing and rewriting "
         "queries to provide comprehensive information from different "
         "perspectives. Given the following input query and a list of "
         "perspectives, generate a pseudo-answer document with one section "
         "for each perspective.\n\n";
  out << "Input Query: " << query << "\n\n";
  out << "List of Perspectives: ";
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (i > 0) out << ", ";
    out << active[i].label;
  }
  out << "\n\nGenerated Pseudo-Answer Document:\n";
  for (std::size_t i = 0; i < active.size(); ++i) {
    out << (i + 1) << ". " << active[i].label << ":\n";
  }
  return out.str();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::regex section_anchor(const std::string& label) {
  static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
  const std::string escaped = std::regex_replace(label, special, R"(\$&)");
  return std::regex(R"(^\s*\d+\.\s*)" + escaped + R"(\s*:)",
                    std::regex::icase);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string::size_type pos = 0;
  while (pos <= text.size()) {
    auto next = text.find('\n', pos);
    if (next == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return lines;
}

}  // namespace

std::vector<std::string> parse_rewrite_sections(
    const std::string& output, const std::vector<std::string>& labels,
    std::vector<bool>* missing) {
  std::vector<std::regex> anchors;
  anchors.reserve(labels.size());
  for (const auto& label : labels) anchors.push_back(section_anchor(label));

  const std::vector<std::string> lines = split_lines(output);

  // anchor_of[line] = which label's header starts at this line, else -1
  std::vector<int> anchor_of(lines.size(), -1);
  std::vector<std::string> remainder(lines.size());
  for (std::size_t li = 0; li < lines.size(); ++li) {
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      std::smatch match;
      if (std::regex_search(lines[li], match, anchors[a])) {
        anchor_of[li] = static_cast<int>(a);
        remainder[li] = lines[li].substr(match.position(0) + match.length(0));
        break;
      }
    }
  }

  std::vector<std::string> sections(labels.size());
  std::vector<bool> found(labels.size(), false);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int a = anchor_of[li];
    if (a < 0 || found[a]) continue;
    found[a] = true;
    std::string body = remainder[li];
    for (std::size_t next = li + 1; next < lines.size() && anchor_of[next] < 0;
         ++next) {
      body += "\n" + lines[next];
    }
    sections[a] = trim(body);
  }

  if (missing != nullptr) {
    missing->assign(labels.size(), false);
    for (std::size_t a = 0; a < labels.size(); ++a) {
      (*missing)[a] = !found[a] || sections[a].empty();
    }
  }
  return sections;
}

std::string mock_rewrite_output(const std::string& query,
                                const std::vector<Perspective>& active) {
  std::ostringstream out;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const auto tokens = tokenize(active[i].label);
    std::string joined;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (t > 0) joined += " ";
      joined += tokens[t];
    }
    out << (i + 1) << ". " << active[i].label << ": " << active[i].label
        << " :: " << query << " :: " << joined << "\n";
  }
  return out.str();
}

std::string chat_complete(const std::string& prompt,
                          const RewriterConfig& config) {
  internal::HttpRequestOptions options;
  options.endpoint = config.endpoint;
  options.path = "/chat/completions";
  options.api_key_env = config.api_key_env;
  options.timeout_ms = config.timeout_ms;
  options.max_retries = config.max_retries;
  options.retry_backoff_ms = config.retry_backoff_ms;

  nlohmann::json body;
  body["model"] = config.model;
  body["temperature"] = config.temperature;
  if (config.max_tokens > 0) body["max_tokens"] = config.max_tokens;
  body["messages"] = nlohmann::json::array(
      {{{"role", "user"}, {"content", prompt}}});

  const nlohmann::json response = internal::post_json(options, body);
  try {
    return response.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("chat completion response malformed: ") +
                        e.what());
  }
}

RewriteSet rewrite(const std::string& query, const PerspectiveVector& vq,
                   const PerspectiveSet& set, const RewriterConfig& config) {
  if (vq.weights.size() != set.perspectives.size()) {
    throw ShapeMismatchError("rewrite: V_q length does not match set size");
  }
  std::vector<Perspective> active;
  for (int idx : vq.active()) active.push_back(set.perspectives[idx]);
  if (active.empty()) {
    throw InvalidArgumentError("rewrite: V_q has no active perspective");
  }

  std::vector<std::string> labels;
  labels.reserve(active.size());
  for (const auto& p : active) labels.push_back(p.label);

  RewriteSet result;
  if (config.per_perspective_calls) {
    // One call per perspective, each with a single-section prompt.
    for (std::size_t i = 0; i < active.size(); ++i) {
      const std::string prompt = build_rewrite_prompt(query, {active[i]});
      const std::string output =
          config.provider == ChatProvider::mock
              ? mock_rewrite_output(query, {active[i]})
              : chat_complete(prompt, config);
      if (!result.prompt.empty()) result.prompt += "\n---\n";
      result.prompt += prompt;
      if (!result.raw_output.empty()) result.raw_output += "\n---\n";
      result.raw_output += output;

      std::vector<bool> missing;
      auto sections = parse_rewrite_sections(output, {labels[i]}, &missing);
      RewriteEntry entry;
      entry.perspective_id = active[i].id;
      entry.label = labels[i];
      entry.used_fallback = missing[0];
      entry.content = missing[0] ? labels[i] + ": " + query : sections[0];
      result.entries.push_back(std::move(entry));
    }
    return result;
  }

  result.prompt = build_rewrite_prompt(query, active);
  result.raw_output = config.provider == ChatProvider::mock
                          ? mock_rewrite_output(query, active)
                          : chat_complete(result.prompt, config);

  std::vector<bool> missing;
  auto sections = parse_rewrite_sections(result.raw_output, labels, &missing);
  for (std::size_t i = 0; i < active.size(); ++i) {
    RewriteEntry entry;
    entry.perspective_id = active[i].id;
    entry.label = labels[i];
    entry.used_fallback = missing[i];
    entry.content = missing[i] ? labels[i] + ": " + query : sections[i];
    result.entries.push_back(std::move(entry));
  }
  return result;
}

}  // namespace mvrag
