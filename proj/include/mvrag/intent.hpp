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

#include "mvrag/embedder.hpp"
#include "mvrag/perspectives.hpp"

namespace mvrag {

/// Per-query perspective weights. Each weight is either 0 or the query's
/// cosine similarity to that perspective (above the threshold), except the
/// single fallback weight kept when everything fell below the threshold.
struct PerspectiveVector {
  std::vector<double> weights;
  double threshold_used = 0.0;
  std::string query_id;  // optional
  bool fallback_used = false;
  int fallback_index = -1;

  std::vector<int> active() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] != 0.0) out.push_back(static_cast<int>(i));
    }
    return out;
  }
};

struct ThresholdCalibration {
  double theta = 0.0;
  double percentile = 0.30;
  int sample_size = 0;
  double score_min = 0.0;
  double score_median = 0.0;
  double score_max = 0.0;
};

/// w_i = cosine(embed(query), p_i.representation) if above theta, else 0.
/// If every similarity falls at or below theta, the single best perspective
/// keeps its raw similarity and the vector is flagged as a fallback.
/// `excluded` (when >= 0) forces that perspective to 0 and bars it from the
/// fallback; used by ablation runs.
PerspectiveVector perspective_weights(const std::string& query,
                                      const PerspectiveSet& set, double theta,
                                      const EmbedderConfig& embedder,
                                      int excluded = -1);

/// Pools all query x perspective cosine scores and takes the empirical
/// percentile by the nearest-rank rule. Requires at least 10 queries.
ThresholdCalibration calibrate_threshold(
    const std::vector<std::string>& validation_queries,
    const PerspectiveSet& set, double percentile,
    const EmbedderConfig& embedder);

/// Nearest-rank percentile of a sample: the ceil(p*N)-th smallest value.
double nearest_rank_percentile(std::vector<double> scores, double percentile);

/// Min-max normalization over the nonzero entries; zeros stay zero and a
/// constant nonzero vector maps to all ones.
std::vector<double> normalize_for_display(const PerspectiveVector& v);

}  // namespace mvrag
