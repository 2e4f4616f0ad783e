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

#include <map>
#include <string>
#include <vector>

#include "mvrag/intent.hpp"
#include "mvrag/retrieval.hpp"
#include "mvrag/rewriter.hpp"

namespace mvrag {

/// How per-perspective similarities combine with perspective weights:
/// `paper` divides the similarity by the weight, `weighted` multiplies.
/// Both are exposed because the division form de-emphasizes strongly
/// matched perspectives; see the module docs.
enum class RerankMode { paper, weighted };

struct RankedResult {
  std::string doc_id;
  double relevance = 0.0;
  int source_perspective_id = -1;  // perspective providing the max relevance
  double similarity = 0.0;
  double weight_used = 0.0;
};

struct PromptBudgetReport {
  int budget = 0;
  int used = 0;  // whitespace tokens spent on document content
  std::vector<std::string> truncated_doc_ids;
  std::vector<std::string> dropped_doc_ids;
};

struct AssembledPrompt {
  std::string text;
  std::vector<std::string> doc_ids;  // in prompt order
  PromptBudgetReport budget;
};

/// Scores every hit against its perspective weight, deduplicates documents
/// across perspectives keeping the single highest relevance, sorts by
/// relevance (ties ascending doc id) and truncates to final_k.
std::vector<RankedResult> rerank(
    const std::map<int, std::vector<RetrievalHit>>& hitsets,
    const PerspectiveVector& vq, RerankMode mode, int final_k);

/// Builds the reader prompt: instruction header, the question, and numbered
/// "Reference [i]:" blocks in rank order. Documents exceeding the remaining
/// whitespace-token budget are cut at a token boundary with a truncation
/// marker; later documents are dropped.
AssembledPrompt assemble_prompt(const std::string& query,
                                const std::vector<RankedResult>& results,
                                const Corpus& corpus, int token_budget = 3000);

/// Single reader call. The mock provider answers from the first reference's
/// document id so offline end-to-end runs are checkable.
std::string read_answer(const AssembledPrompt& prompt,
                        const RewriterConfig& config);

}  // namespace mvrag
