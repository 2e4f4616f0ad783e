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

#include "mvrag/rerank.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "mvrag/error.hpp"

namespace mvrag {

std::vector<RankedResult> rerank(
    const std::map<int, std::vector<RetrievalHit>>& hitsets,
    const PerspectiveVector& vq, RerankMode mode, int final_k) {
  if (final_k < 1) {
    throw InvalidArgumentError("rerank: final_k must be >= 1");
  }

  std::unordered_map<std::string, RankedResult> best;
  for (const auto& [perspective_id, hits] : hitsets) {
    if (perspective_id < 0 ||
        perspective_id >= static_cast<int>(vq.weights.size())) {
      throw UnknownPerspectiveError("rerank: perspective " +
                                    std::to_string(perspective_id) +
                                    " not in V_q");
    }
    const double w = vq.weights[perspective_id];
    if (w == 0.0) {
      throw ZeroWeightError("rerank: perspective " +
                            std::to_string(perspective_id) +
                            " has zero weight");
    }
    for (const auto& hit : hits) {
      const double rel =
          mode == RerankMode::paper ? hit.similarity / w : hit.similarity * w;
      auto it = best.find(hit.doc_id);
      // Keep the max-relevance provenance; on an exact tie the earlier
      // (lower-id) perspective wins since hitsets iterate in id order.
      if (it == best.end() || rel > it->second.relevance) {
        RankedResult r;
        r.doc_id = hit.doc_id;
        r.relevance = rel;
        r.source_perspective_id = perspective_id;
        r.similarity = hit.similarity;
        r.weight_used = w;
        best[hit.doc_id] = std::move(r);
      }
    }
  }

  std::vector<RankedResult> ranked;
  ranked.reserve(best.size());
  for (auto& [id, r] : best) ranked.push_back(std::move(r));
  std::sort(ranked.begin(), ranked.end(),
            [](const RankedResult& a, const RankedResult& b) {
              if (a.relevance != b.relevance) return a.relevance > b.relevance;
              return a.doc_id < b.doc_id;
            });
  if (static_cast<int>(ranked.size()) > final_k) {
    ranked.resize(final_k);
  }
  return ranked;
}

namespace {

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

}  // namespace

AssembledPrompt assemble_prompt(const std::string& query,
                                const std::vector<RankedResult>& results,
                                const Corpus& corpus, int token_budget) {
  if (results.empty()) {
    throw InvalidArgumentError("assemble_prompt: results must be non-empty");
  }
  if (token_budget < 1) {
    throw InvalidArgumentError("assemble_prompt: token budget must be >= 1");
  }

  std::unordered_map<std::string, const Document*> by_id;
  by_id.reserve(corpus.size());
  for (const auto& doc : corpus.documents) by_id[doc.id] = &doc;

  AssembledPrompt prompt;
  prompt.budget.budget = token_budget;

  std::ostringstream out;
  out << "You are a domain expert. Answer the question using the numbered "
         "reference documents.\n\n";
  out << "Question: " << query << "\n";

  int remaining = token_budget;
  int reference = 0;
  for (const auto& result : results) {
    auto it = by_id.find(result.doc_id);
    if (it == by_id.end()) {
      throw InvalidArgumentError("assemble_prompt: unknown doc id " +
                                 result.doc_id);
    }
    if (remaining <= 0) {
      prompt.budget.dropped_doc_ids.push_back(result.doc_id);
      continue;
    }
    const std::vector<std::string> tokens = whitespace_tokens(it->second->text);
    std::string body;
    if (static_cast<int>(tokens.size()) <= remaining) {
      body = it->second->text;
      remaining -= static_cast<int>(tokens.size());
      prompt.budget.used += static_cast<int>(tokens.size());
    } else {
      for (int t = 0; t < remaining; ++t) {
        if (t > 0) body += " ";
        body += tokens[t];
      }
      body += " ...[truncated]";
      prompt.budget.used += remaining;
      remaining = 0;
      prompt.budget.truncated_doc_ids.push_back(result.doc_id);
    }
    ++reference;
    out << "\nReference [" << reference << "]: " << body << "\n";
    prompt.doc_ids.push_back(result.doc_id);
  }

  prompt.text = out.str();
  return prompt;
}

std::string read_answer(const AssembledPrompt& prompt,
                        const RewriterConfig& config) {
  if (prompt.doc_ids.empty()) {
    throw InvalidArgumentError("read_answer: prompt has no references");
  }
  if (config.provider == ChatProvider::mock) {
    return "Answer derived from Reference [1] (doc " + prompt.doc_ids.front() +
           ").";
  }
  return chat_complete(prompt.text, config);
}

}  // namespace mvrag
