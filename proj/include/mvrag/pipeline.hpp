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

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mvrag/corpus.hpp"
#include "mvrag/embedder.hpp"
#include "mvrag/perspectives.hpp"
#include "mvrag/rerank.hpp"
#include "mvrag/retrieval.hpp"
#include "mvrag/rewriter.hpp"

namespace mvrag {

/// Settings for the whole pipeline, offline and online.
struct PipelineConfig {
  std::string corpus_path;
  EmbedderConfig embedder;
  RewriterConfig rewriter;
  RewriterConfig reader;
  VocabConfig vocab;

  double variance_target = 0.90;
  int max_components = 64;
  std::vector<int> topic_grid = {2, 3, 4, 5, 6, 7, 8};
  int fixed_r = 0;  // > 0 pins the topic count and skips the grid search
  int k_terms = 10;

  // theta is NaN until set explicitly or taken from a calibration run
  double theta = std::numeric_limits<double>::quiet_NaN();
  double percentile = 0.30;

  int per_perspective_k = 10;
  int final_k = 8;
  RerankMode rerank_mode = RerankMode::paper;
  PerspectiveRepresentation representation = PerspectiveRepresentation::term;
  int prompt_token_budget = 3000;
  std::uint64_t seed = 42;

  bool has_theta() const { return theta == theta; }
};

using StageTimings = std::vector<std::pair<std::string, double>>;

/// Offline stage: embeds the corpus, fits PCA, builds the tf-idf matrix,
/// selects the topic count, fits NMF, extracts top terms and aligns them to
/// the principal components. Stage failures are rethrown as PipelineError
/// tagged with the stage name. Per-stage wall times land in `timings` when
/// provided.
PerspectiveSet extract_perspectives(const Corpus& corpus,
                                    const PipelineConfig& config,
                                    StageTimings* timings = nullptr);

/// Everything the online pipeline produced for one query.
struct QueryTrace {
  std::string query;
  PerspectiveVector vq;
  RewriteSet rewrites;
  std::map<int, std::vector<RetrievalHit>> hits;
  std::vector<RankedResult> reranked;
  AssembledPrompt prompt;
  std::optional<std::string> answer;
};

/// Online stage: intention weights, rewriting, per-perspective retrieval,
/// re-ranking, prompt assembly and (optionally) the reader call.
QueryTrace run_query(const std::string& query, const PerspectiveSet& set,
                     const VectorIndex& index, const Corpus& corpus,
                     const PipelineConfig& config, bool call_reader);

nlohmann::json trace_json(const QueryTrace& trace);

}  // namespace mvrag
