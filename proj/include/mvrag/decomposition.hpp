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
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mvrag/corpus.hpp"

namespace mvrag {

/// Principal components of a mean-centered data matrix. Components are rows,
/// orthonormal, ordered by descending explained variance.
struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;                // n x dim
  Eigen::VectorXd explained_variance_ratio;  // per kept component

  int n_components() const { return static_cast<int>(components.rows()); }
};

struct PcaOptions {
  double variance_target = 0.90;
  int max_components = 64;
};

/// SVD-based PCA. Keeps the smallest component prefix whose cumulative
/// explained-variance ratio reaches the target, capped at
/// min(rows-1, cols, max_components). Component signs are fixed so the
/// largest-magnitude entry of each component is positive.
PcaModel pca_fit(const Eigen::MatrixXd& doc_vectors, const PcaOptions& options = {});

struct NmfConfig {
  std::uint64_t seed = 42;
  int max_iterations = 200;
  double tolerance = 1e-4;  // relative objective change for early stop
  double epsilon = 1e-9;    // added to update denominators

  /// Optional per-iteration observer: (iteration, W, H, objective).
  std::function<void(int, const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                     double)>
      on_iteration;
};

struct NmfModel {
  Eigen::MatrixXd W;  // docs x r
  Eigen::MatrixXd H;  // r x terms
  std::vector<double> objective_trace;  // Frobenius errors; [0] is at init
  int r = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
};

/// Frobenius NMF via multiplicative updates:
///   H <- H .* (W'X) ./ (W'WH + eps),  W <- W .* (XH') ./ (WHH' + eps)
/// stopping when the relative objective change drops below the tolerance or
/// the iteration cap is reached. Initialization is uniform-random scaled to
/// the data magnitude, from the configured seed.
NmfModel nmf_fit(const DocTermMatrix& X, int r, const NmfConfig& config = {});

struct TopicTerms {
  // topics[j] holds (term, weight) pairs, weight non-increasing, k per topic
  std::vector<std::vector<std::pair<std::string, double>>> topics;
  int k = 0;
};

/// For each topic row of H, the k largest-weight terms; ties break
/// lexicographically.
TopicTerms top_terms(const NmfModel& model, const Vocabulary& vocab, int k);

/// UMass coherence of an ordered term list over document-level co-occurrence:
/// sum over i<j of ln((D(t_i,t_j)+1)/D(t_j)). Zero document frequencies in
/// the denominator are clamped to 1, so absent terms contribute 0.
double coherence(const std::vector<std::string>& topic, const Corpus& corpus,
                 const TokenizerConfig& tokenizer = {});

/// Fits one NMF per candidate topic count and returns the count whose topics
/// maximize mean UMass coherence on the corpus; ties go to the smallest
/// candidate. A singleton grid is returned without fitting anything.
int select_topic_count(const DocTermMatrix& X, const Corpus& corpus,
                       const Vocabulary& vocab, const std::vector<int>& grid,
                       const NmfConfig& config = {}, int coherence_top_k = 10);

}  // namespace mvrag
