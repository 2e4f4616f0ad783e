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

#include "mvrag/intent.hpp"

#include <algorithm>
#include <cmath>

#include "mvrag/error.hpp"

namespace mvrag {

PerspectiveVector perspective_weights(const std::string& query,
                                      const PerspectiveSet& set, double theta,
                                      const EmbedderConfig& embedder,
                                      int excluded) {
  if (theta < -1.0 || theta >= 1.0) {
    throw InvalidArgumentError("perspective_weights: theta must be in [-1, 1)");
  }
  if (set.perspectives.empty()) {
    throw InvalidArgumentError("perspective_weights: empty perspective set");
  }

  const EmbeddingVector query_vec = embed_text(query, embedder);

  PerspectiveVector result;
  result.threshold_used = theta;
  result.weights.resize(set.perspectives.size(), 0.0);

  std::vector<double> raw(set.perspectives.size(), 0.0);
  bool any_active = false;
  for (std::size_t i = 0; i < set.perspectives.size(); ++i) {
    if (static_cast<int>(i) == excluded) continue;
    raw[i] = cosine(query_vec, set.perspectives[i].representation);
    if (raw[i] > theta) {
      result.weights[i] = raw[i];
      any_active = true;
    }
  }

  if (!any_active) {
    int best = -1;
    double best_score = -2.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (static_cast<int>(i) == excluded) continue;
      if (raw[i] > best_score) {
        best_score = raw[i];
        best = static_cast<int>(i);
      }
    }
    if (best < 0) {
      throw InvalidArgumentError(
          "perspective_weights: no perspective left after exclusion");
    }
    result.weights[best] = best_score;
    result.fallback_used = true;
    result.fallback_index = best;
  }
  return result;
}

double nearest_rank_percentile(std::vector<double> scores, double percentile) {
  if (scores.empty()) {
    throw InvalidArgumentError("nearest_rank_percentile: empty sample");
  }
  if (percentile <= 0.0 || percentile >= 1.0) {
    throw InvalidArgumentError("nearest_rank_percentile: percentile in (0,1)");
  }
  std::sort(scores.begin(), scores.end());
  const auto n = static_cast<double>(scores.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile * n));
  rank = std::clamp<std::size_t>(rank, 1, scores.size());
  return scores[rank - 1];
}

ThresholdCalibration calibrate_threshold(
    const std::vector<std::string>& validation_queries,
    const PerspectiveSet& set, double percentile,
    const EmbedderConfig& embedder) {
  if (validation_queries.size() < 10) {
    throw TooFewQueriesError("calibrate_threshold: need >= 10 queries, got " +
                             std::to_string(validation_queries.size()));
  }
  if (percentile <= 0.0 || percentile >= 1.0) {
    throw InvalidArgumentError("calibrate_threshold: percentile in (0,1)");
  }

  std::vector<double> pooled;
  pooled.reserve(validation_queries.size() * set.perspectives.size());
  const std::vector<EmbeddingVector> query_vecs =
      embed_texts(validation_queries, embedder);
  for (const auto& qv : query_vecs) {
    for (const auto& p : set.perspectives) {
      pooled.push_back(cosine(qv, p.representation));
    }
  }

  ThresholdCalibration calibration;
  calibration.percentile = percentile;
  calibration.sample_size = static_cast<int>(pooled.size());
  calibration.theta = nearest_rank_percentile(pooled, percentile);

  std::sort(pooled.begin(), pooled.end());
  calibration.score_min = pooled.front();
  calibration.score_max = pooled.back();
  calibration.score_median = pooled[pooled.size() / 2];
  return calibration;
}

std::vector<double> normalize_for_display(const PerspectiveVector& v) {
  std::vector<double> out(v.weights.size(), 0.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (double w : v.weights) {
    if (w != 0.0) {
      lo = std::min(lo, w);
      hi = std::max(hi, w);
      any = true;
    }
  }
  if (!any) return out;
  for (std::size_t i = 0; i < v.weights.size(); ++i) {
    if (v.weights[i] == 0.0) continue;
    out[i] = hi == lo ? 1.0 : (v.weights[i] - lo) / (hi - lo);
  }
  return out;
}

}  // namespace mvrag
