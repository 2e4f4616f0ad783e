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

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvrag/perspectives.hpp"
#include "mvrag/rerank.hpp"
#include "mvrag/retrieval.hpp"
#include "mvrag/synthetic.hpp"

namespace mvrag {

/// |top-k of ranked ∩ relevant| / |relevant|.
double recall_at_k(const std::vector<std::string>& ranked,
                   const std::set<std::string>& relevant, int k);

/// 1/rank of the first relevant document within the top k, else 0.
double mrr_at_k(const std::vector<std::string>& ranked,
                const std::set<std::string>& relevant, int k = 10);

/// TREC-style qrels: whitespace-separated "query_id 0 doc_id relevance"
/// lines; positive relevance marks a relevant document.
Qrels load_qrels(const std::string& path);

/// Queries as "id<TAB>text" lines (first whitespace run splits when no tab).
std::vector<QueryRecord> load_queries_tsv(const std::string& path);

/// TREC run file: "query_id Q0 doc_id rank score tag". Returns rankings in
/// rank order per query.
std::map<std::string, std::vector<std::string>> load_run_file(
    const std::string& path);

struct MethodMetrics {
  double recall5 = 0.0;
  double recall10 = 0.0;
  double mrr10 = 0.0;
};

struct PerQueryResult {
  std::string query_id;
  std::map<std::string, std::vector<std::string>> rankings;  // method -> ids
  std::map<int, std::vector<std::string>> per_perspective;   // mvrag hits
  std::vector<double> vq_weights;
};

struct EvaluationReport {
  std::map<std::string, MethodMetrics> methods;
  std::vector<PerQueryResult> per_query;
  nlohmann::json params;
};

struct BenchmarkConfig {
  int per_perspective_k = 10;
  int final_k = 10;
  int eval_k = 10;
  RerankMode rerank_mode = RerankMode::paper;
  double theta = std::numeric_limits<double>::quiet_NaN();  // NaN: calibrate
  double percentile = 0.30;
  bool run_baseline = true;
  bool run_mvrag = true;
  int excluded_perspective = -1;  // set by ablation runs

  bool has_theta() const { return theta == theta; }
};

/// Runs the single-query baseline and/or the full multi-view pipeline over
/// the same index and embedder and reports Recall@5/10 and MRR@10 averaged
/// over the queries that appear in the qrels.
EvaluationReport run_benchmark(const Corpus& corpus,
                               const std::vector<QueryRecord>& queries,
                               const Qrels& qrels, const PerspectiveSet& set,
                               const VectorIndex& index,
                               const EmbedderConfig& embedder,
                               const RewriterConfig& rewriter,
                               const BenchmarkConfig& config);

/// Reruns the benchmark with one perspective forced to weight 0 in every
/// V_q (the fallback rule re-applies among the remaining perspectives).
EvaluationReport ablate_perspective(const Corpus& corpus,
                                    const std::vector<QueryRecord>& queries,
                                    const Qrels& qrels,
                                    const PerspectiveSet& set,
                                    const VectorIndex& index,
                                    const EmbedderConfig& embedder,
                                    const RewriterConfig& rewriter,
                                    const BenchmarkConfig& config,
                                    int excluded);

/// Scores an externally produced run file against qrels.
MethodMetrics evaluate_run(
    const std::map<std::string, std::vector<std::string>>& run,
    const Qrels& qrels);

struct InteractionMatrix {
  std::vector<std::string> doc_ids;
  Eigen::MatrixXd values;  // symmetric, zero diagonal
};

using SubsetScorer = std::function<double(const std::vector<std::string>&)>;

/// Double leave-one-out second differences over the full evidence set E:
/// I(i,j) = S(E) - S(E\{i}) - S(E\{j}) + S(E\{i,j}). Positive values mean
/// complementary evidences, negative redundant ones.
InteractionMatrix interaction_matrix(const std::vector<std::string>& evidences,
                                     const SubsetScorer& scorer);

std::string interaction_csv(const InteractionMatrix& matrix);

/// Synthetic scorers used to validate the interaction estimator offline.
SubsetScorer additive_scorer(const std::map<std::string, double>& per_doc);
SubsetScorer redundant_pair_scorer(const std::string& a, const std::string& b);
SubsetScorer complementary_pair_scorer(const std::string& a,
                                       const std::string& b);

nlohmann::json report_json(const EvaluationReport& report);
std::string report_table(const EvaluationReport& report);

}  // namespace mvrag
