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

#include "mvrag/eval.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mvrag/error.hpp"
#include "mvrag/intent.hpp"

namespace mvrag {

double recall_at_k(const std::vector<std::string>& ranked,
                   const std::set<std::string>& relevant, int k) {
  if (k < 1) {
    throw InvalidArgumentError("recall_at_k: k must be >= 1");
  }
  if (relevant.empty()) {
    throw EmptyRelevantError("recall_at_k: relevant set is empty");
  }
  std::size_t found = 0;
  const std::size_t depth = std::min<std::size_t>(k, ranked.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (relevant.count(ranked[i])) ++found;
  }
  return static_cast<double>(found) / static_cast<double>(relevant.size());
}

double mrr_at_k(const std::vector<std::string>& ranked,
                const std::set<std::string>& relevant, int k) {
  if (k < 1) {
    throw InvalidArgumentError("mrr_at_k: k must be >= 1");
  }
  if (relevant.empty()) {
    throw EmptyRelevantError("mrr_at_k: relevant set is empty");
  }
  const std::size_t depth = std::min<std::size_t>(k, ranked.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (relevant.count(ranked[i])) {
      return 1.0 / static_cast<double>(i + 1);
    }
  }
  return 0.0;
}

Qrels load_qrels(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open qrels file: " + path);
  }
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string qid, iteration, doc_id;
    int rel = 0;
    if (!(fields >> qid)) continue;  // blank line
    if (!(fields >> iteration >> doc_id >> rel)) {
      throw FormatError("qrels line " + std::to_string(lineno) +
                        ": expected \"query_id 0 doc_id relevance\"");
    }
    if (rel > 0) qrels.relevant[qid].insert(doc_id);
  }
  return qrels;
}

std::vector<QueryRecord> load_queries_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open queries file: " + path);
  }
  std::vector<QueryRecord> queries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto split = line.find('\t');
    if (split == std::string::npos) split = line.find(' ');
    if (split == std::string::npos || split == 0 || split + 1 >= line.size()) {
      throw FormatError("queries line " + std::to_string(lineno) +
                        ": expected \"id<TAB>text\"");
    }
    queries.push_back({line.substr(0, split), line.substr(split + 1)});
  }
  return queries;
}

std::map<std::string, std::vector<std::string>> load_run_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open run file: " + path);
  }
  std::map<std::string, std::vector<std::pair<int, std::string>>> staged;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string qid, q0, doc_id, tag;
    int rank = 0;
    double score = 0.0;
    if (!(fields >> qid)) continue;
    if (!(fields >> q0 >> doc_id >> rank >> score)) {
      throw FormatError("run file line " + std::to_string(lineno) +
                        ": expected \"query_id Q0 doc_id rank score tag\"");
    }
    staged[qid].emplace_back(rank, doc_id);
  }
  std::map<std::string, std::vector<std::string>> run;
  for (auto& [qid, entries] : staged) {
    std::sort(entries.begin(), entries.end());
    auto& ranking = run[qid];
    ranking.reserve(entries.size());
    for (auto& [rank, doc] : entries) ranking.push_back(std::move(doc));
  }
  return run;
}

MethodMetrics evaluate_run(
    const std::map<std::string, std::vector<std::string>>& run,
    const Qrels& qrels) {
  MethodMetrics metrics;
  int counted = 0;
  static const std::vector<std::string> kEmpty;
  for (const auto& [qid, relevant] : qrels.relevant) {
    auto it = run.find(qid);
    const auto& ranking = it == run.end() ? kEmpty : it->second;
    metrics.recall5 += recall_at_k(ranking, relevant, 5);
    metrics.recall10 += recall_at_k(ranking, relevant, 10);
    metrics.mrr10 += mrr_at_k(ranking, relevant, 10);
    ++counted;
  }
  if (counted > 0) {
    metrics.recall5 /= counted;
    metrics.recall10 /= counted;
    metrics.mrr10 /= counted;
  }
  return metrics;
}

EvaluationReport run_benchmark(const Corpus& corpus,
                               const std::vector<QueryRecord>& queries,
                               const Qrels& qrels, const PerspectiveSet& set,
                               const VectorIndex& index,
                               const EmbedderConfig& embedder,
                               const RewriterConfig& rewriter,
                               const BenchmarkConfig& config) {
  if (corpus.size() != index.size()) {
    throw ShapeMismatchError("run_benchmark: index built from a different corpus (" +
                             std::to_string(index.size()) + " vectors vs " +
                             std::to_string(corpus.size()) + " documents)");
  }
  std::map<std::string, const QueryRecord*> by_id;
  for (const auto& q : queries) by_id[q.id] = &q;
  for (const auto& [qid, docs] : qrels.relevant) {
    if (!by_id.count(qid)) {
      throw InvalidArgumentError("run_benchmark: qrels reference unknown query id \"" +
                                 qid + "\"");
    }
  }

  double theta = config.theta;
  if (!config.has_theta()) {
    std::vector<std::string> texts;
    texts.reserve(queries.size());
    for (const auto& q : queries) texts.push_back(q.text);
    theta = calibrate_threshold(texts, set, config.percentile, embedder).theta;
  }

  EvaluationReport report;
  report.params = {{"per_perspective_k", config.per_perspective_k},
                   {"final_k", config.final_k},
                   {"eval_k", config.eval_k},
                   {"rerank_mode", config.rerank_mode == RerankMode::paper
                                       ? "paper"
                                       : "weighted"},
                   {"theta", theta},
                   {"excluded_perspective", config.excluded_perspective},
                   {"embedder_seed", embedder.seed}};

  MethodMetrics baseline;
  MethodMetrics mvrag;
  int counted = 0;

  for (const auto& query : queries) {
    PerQueryResult row;
    row.query_id = query.id;

    if (config.run_baseline) {
      const auto hits =
          search(index, embed_text(query.text, embedder), config.eval_k);
      auto& ranking = row.rankings["baseline_single_query"];
      ranking.reserve(hits.size());
      for (const auto& hit : hits) ranking.push_back(hit.doc_id);
    }

    if (config.run_mvrag) {
      const PerspectiveVector vq = perspective_weights(
          query.text, set, theta, embedder, config.excluded_perspective);
      row.vq_weights = vq.weights;
      const RewriteSet rewrites = rewrite(query.text, vq, set, rewriter);
      const auto hitsets =
          multi_view_retrieve(rewrites, index, config.per_perspective_k, embedder);
      for (const auto& [pid, hits] : hitsets) {
        auto& ids = row.per_perspective[pid];
        ids.reserve(hits.size());
        for (const auto& hit : hits) ids.push_back(hit.doc_id);
      }
      const auto ranked =
          rerank(hitsets, vq, config.rerank_mode, config.final_k);
      auto& ranking = row.rankings["mvrag"];
      ranking.reserve(ranked.size());
      for (const auto& r : ranked) ranking.push_back(r.doc_id);
    }

    auto qrels_it = qrels.relevant.find(query.id);
    if (qrels_it != qrels.relevant.end()) {
      const auto& relevant = qrels_it->second;
      if (config.run_baseline) {
        const auto& ranking = row.rankings["baseline_single_query"];
        baseline.recall5 += recall_at_k(ranking, relevant, 5);
        baseline.recall10 += recall_at_k(ranking, relevant, 10);
        baseline.mrr10 += mrr_at_k(ranking, relevant, 10);
      }
      if (config.run_mvrag) {
        const auto& ranking = row.rankings["mvrag"];
        mvrag.recall5 += recall_at_k(ranking, relevant, 5);
        mvrag.recall10 += recall_at_k(ranking, relevant, 10);
        mvrag.mrr10 += mrr_at_k(ranking, relevant, 10);
      }
      ++counted;
    }
    report.per_query.push_back(std::move(row));
  }

  if (counted > 0) {
    baseline.recall5 /= counted;
    baseline.recall10 /= counted;
    baseline.mrr10 /= counted;
    mvrag.recall5 /= counted;
    mvrag.recall10 /= counted;
    mvrag.mrr10 /= counted;
  }
  if (config.run_baseline) report.methods["baseline_single_query"] = baseline;
  if (config.run_mvrag) report.methods["mvrag"] = mvrag;
  return report;
}

EvaluationReport ablate_perspective(const Corpus& corpus,
                                    const std::vector<QueryRecord>& queries,
                                    const Qrels& qrels,
                                    const PerspectiveSet& set,
                                    const VectorIndex& index,
                                    const EmbedderConfig& embedder,
                                    const RewriterConfig& rewriter,
                                    const BenchmarkConfig& config,
                                    int excluded) {
  if (excluded < 0 || excluded >= static_cast<int>(set.size())) {
    throw UnknownPerspectiveError("ablate_perspective: no perspective with id " +
                                  std::to_string(excluded));
  }
  BenchmarkConfig ablated = config;
  ablated.excluded_perspective = excluded;
  return run_benchmark(corpus, queries, qrels, set, index, embedder, rewriter,
                       ablated);
}

InteractionMatrix interaction_matrix(const std::vector<std::string>& evidences,
                                     const SubsetScorer& scorer) {
  if (evidences.size() < 2) {
    throw InvalidArgumentError("interaction_matrix: need >= 2 evidences");
  }
  {
    std::set<std::string> unique(evidences.begin(), evidences.end());
    if (unique.size() != evidences.size()) {
      throw InvalidArgumentError("interaction_matrix: evidence ids must be unique");
    }
  }

  const auto score = [&](const std::vector<std::string>& subset) {
    try {
      return scorer(subset);
    } catch (const std::exception& e) {
      throw ScorerFailureError(std::string("interaction scorer failed: ") +
                               e.what());
    }
  };
  const auto without = [&](int a, int b) {
    std::vector<std::string> subset;
    subset.reserve(evidences.size());
    for (int i = 0; i < static_cast<int>(evidences.size()); ++i) {
      if (i != a && i != b) subset.push_back(evidences[i]);
    }
    return subset;
  };

  const int n = static_cast<int>(evidences.size());
  const double full = score(evidences);
  std::vector<double> leave_one(n);
  for (int i = 0; i < n; ++i) leave_one[i] = score(without(i, -1));

  InteractionMatrix matrix;
  matrix.doc_ids = evidences;
  matrix.values = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double interaction =
          full - leave_one[i] - leave_one[j] + score(without(i, j));
      matrix.values(i, j) = interaction;
      matrix.values(j, i) = interaction;
    }
  }
  return matrix;
}

std::string interaction_csv(const InteractionMatrix& matrix) {
  std::ostringstream out;
  out << "evidence";
  for (const auto& id : matrix.doc_ids) out << "," << id;
  out << "\n";
  out.precision(12);
  for (Eigen::Index i = 0; i < matrix.values.rows(); ++i) {
    out << matrix.doc_ids[i];
    for (Eigen::Index j = 0; j < matrix.values.cols(); ++j) {
      out << "," << matrix.values(i, j);
    }
    out << "\n";
  }
  return out.str();
}

SubsetScorer additive_scorer(const std::map<std::string, double>& per_doc) {
  return [per_doc](const std::vector<std::string>& subset) {
    double total = 0.0;
    for (const auto& id : subset) {
      auto it = per_doc.find(id);
      if (it != per_doc.end()) total += it->second;
    }
    return total;
  };
}

SubsetScorer redundant_pair_scorer(const std::string& a, const std::string& b) {
  return [a, b](const std::vector<std::string>& subset) {
    for (const auto& id : subset) {
      if (id == a || id == b) return 1.0;
    }
    return 0.0;
  };
}

SubsetScorer complementary_pair_scorer(const std::string& a,
                                       const std::string& b) {
  return [a, b](const std::vector<std::string>& subset) {
    bool has_a = false;
    bool has_b = false;
    for (const auto& id : subset) {
      has_a = has_a || id == a;
      has_b = has_b || id == b;
    }
    return has_a && has_b ? 1.0 : 0.0;
  };
}

nlohmann::json report_json(const EvaluationReport& report) {
  nlohmann::json j;
  j["params"] = report.params;
  for (const auto& [method, metrics] : report.methods) {
    j["methods"][method] = {{"recall@5", metrics.recall5},
                            {"recall@10", metrics.recall10},
                            {"mrr@10", metrics.mrr10}};
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.per_query) {
    nlohmann::json r;
    r["query_id"] = row.query_id;
    for (const auto& [method, ranking] : row.rankings) {
      r["rankings"][method] = ranking;
    }
    if (!row.per_perspective.empty()) {
      nlohmann::json pp;
      for (const auto& [pid, ids] : row.per_perspective) {
        pp[std::to_string(pid)] = ids;
      }
      r["per_perspective"] = std::move(pp);
    }
    if (!row.vq_weights.empty()) r["vq_weights"] = row.vq_weights;
    rows.push_back(std::move(r));
  }
  j["per_query"] = std::move(rows);
  return j;
}

std::string report_table(const EvaluationReport& report) {
  std::ostringstream out;
  out << "method                     R@5      R@10     MRR@10\n";
  out.setf(std::ios::fixed);
  out.precision(4);
  for (const auto& [method, metrics] : report.methods) {
    out << method;
    for (std::size_t pad = method.size(); pad < 25; ++pad) out << ' ';
    out << "  " << metrics.recall5 << "   " << metrics.recall10 << "   "
        << metrics.mrr10 << "\n";
  }
  return out.str();
}

}  // namespace mvrag
