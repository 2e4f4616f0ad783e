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

#include "mvrag/pipeline.hpp"

#include <chrono>

#include "mvrag/decomposition.hpp"
#include "mvrag/error.hpp"
#include "mvrag/intent.hpp"

namespace mvrag {

namespace {

class StageClock {
 public:
  explicit StageClock(StageTimings* timings) : timings_(timings) {}

  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(stage, start);
      } else {
        auto result = fn();
        record(stage, start);
        return result;
      }
    } catch (const Error& e) {
      throw PipelineError(stage, e.what());
    }
  }

 private:
  void record(const std::string& stage,
              std::chrono::steady_clock::time_point start) {
    if (timings_ == nullptr) return;
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    timings_->emplace_back(stage, elapsed.count());
  }

  StageTimings* timings_;
};

}  // namespace

PerspectiveSet extract_perspectives(const Corpus& corpus,
                                    const PipelineConfig& config,
                                    StageTimings* timings) {
  StageClock clock(timings);

  const Eigen::MatrixXd doc_matrix = clock.run("embed_corpus", [&] {
    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const auto& doc : corpus.documents) texts.push_back(doc.text);
    const auto vectors = embed_texts(texts, config.embedder);
    Eigen::MatrixXd matrix(vectors.size(), vectors.front().dim());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      matrix.row(static_cast<Eigen::Index>(i)) = vectors[i].values.transpose();
    }
    return matrix;
  });

  const PcaModel pca = clock.run("pca_fit", [&] {
    PcaOptions options;
    options.variance_target = config.variance_target;
    options.max_components = config.max_components;
    return pca_fit(doc_matrix, options);
  });

  const Vocabulary vocab = clock.run(
      "build_vocabulary", [&] { return build_vocabulary(corpus, config.vocab); });

  const DocTermMatrix tfidf =
      clock.run("build_tfidf", [&] { return build_tfidf(corpus, vocab); });

  NmfConfig nmf_config;
  nmf_config.seed = config.seed;

  const int r = clock.run("select_topic_count", [&] {
    if (config.fixed_r > 0) return config.fixed_r;
    return select_topic_count(tfidf, corpus, vocab, config.topic_grid,
                              nmf_config, config.k_terms);
  });

  const NmfModel nmf =
      clock.run("nmf_fit", [&] { return nmf_fit(tfidf, r, nmf_config); });

  const TopicTerms terms = clock.run("top_terms", [&] {
    return top_terms(nmf, vocab, std::min(config.k_terms, vocab.size()));
  });

  PerspectiveSet set = clock.run("align_perspectives", [&] {
    return align_perspectives(pca, terms, config.embedder,
                              config.representation);
  });

  set.corpus_fingerprint = corpus_fingerprint(corpus);
  set.variance_target = config.variance_target;
  set.r = r;
  set.k_terms = config.k_terms;
  set.seed = config.seed;
  return set;
}

QueryTrace run_query(const std::string& query, const PerspectiveSet& set,
                     const VectorIndex& index, const Corpus& corpus,
                     const PipelineConfig& config, bool call_reader) {
  if (!config.has_theta()) {
    throw InvalidArgumentError(
        "run_query: theta is unset; run calibration or set it explicitly");
  }

  QueryTrace trace;
  trace.query = query;
  try {
    trace.vq = perspective_weights(query, set, config.theta, config.embedder);
  } catch (const Error& e) {
    throw PipelineError("perspective_weights", e.what());
  }
  try {
    trace.rewrites = rewrite(query, trace.vq, set, config.rewriter);
  } catch (const Error& e) {
    throw PipelineError("rewrite", e.what());
  }
  try {
    trace.hits = multi_view_retrieve(trace.rewrites, index,
                                     config.per_perspective_k, config.embedder);
  } catch (const Error& e) {
    throw PipelineError("multi_view_retrieve", e.what());
  }
  try {
    trace.reranked =
        rerank(trace.hits, trace.vq, config.rerank_mode, config.final_k);
  } catch (const Error& e) {
    throw PipelineError("rerank", e.what());
  }
  try {
    trace.prompt = assemble_prompt(query, trace.reranked, corpus,
                                   config.prompt_token_budget);
  } catch (const Error& e) {
    throw PipelineError("assemble_prompt", e.what());
  }
  if (call_reader) {
    try {
      trace.answer = read_answer(trace.prompt, config.reader);
    } catch (const Error& e) {
      throw PipelineError("read_answer", e.what());
    }
  }
  return trace;
}

nlohmann::json trace_json(const QueryTrace& trace) {
  nlohmann::json j;
  j["query"] = trace.query;
  j["v_q"] = {{"weights", trace.vq.weights},
              {"threshold", trace.vq.threshold_used},
              {"fallback_used", trace.vq.fallback_used}};

  nlohmann::json rewrites = nlohmann::json::array();
  for (const auto& entry : trace.rewrites.entries) {
    rewrites.push_back({{"perspective_id", entry.perspective_id},
                        {"label", entry.label},
                        {"content", entry.content},
                        {"used_fallback", entry.used_fallback}});
  }
  j["rewrites"] = std::move(rewrites);

  nlohmann::json hits;
  for (const auto& [pid, list] : trace.hits) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& hit : list) {
      items.push_back({{"doc_id", hit.doc_id},
                       {"similarity", hit.similarity},
                       {"rank", hit.rank}});
    }
    hits[std::to_string(pid)] = std::move(items);
  }
  j["hits_per_perspective"] = std::move(hits);

  nlohmann::json reranked = nlohmann::json::array();
  for (const auto& r : trace.reranked) {
    reranked.push_back({{"doc_id", r.doc_id},
                        {"relevance", r.relevance},
                        {"source_perspective_id", r.source_perspective_id},
                        {"similarity", r.similarity},
                        {"weight_used", r.weight_used}});
  }
  j["reranked"] = std::move(reranked);

  j["prompt"] = {{"text", trace.prompt.text},
                 {"doc_ids", trace.prompt.doc_ids},
                 {"budget",
                  {{"budget", trace.prompt.budget.budget},
                   {"used", trace.prompt.budget.used},
                   {"truncated", trace.prompt.budget.truncated_doc_ids},
                   {"dropped", trace.prompt.budget.dropped_doc_ids}}}};
  if (trace.answer.has_value()) {
    j["answer"] = *trace.answer;
  } else {
    j["answer"] = nullptr;
  }
  return j;
}

}  // namespace mvrag
