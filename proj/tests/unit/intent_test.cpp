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
#include <random>

#include "doctest.h"
#include "mvrag/error.hpp"
#include "test_support.hpp"

using namespace mvrag;

namespace {

EmbedderConfig hashing_config(int dim = 64) {
  EmbedderConfig config;
  config.dim = dim;
  config.seed = 42;
  return config;
}

PerspectiveSet set_with_representations(
    const std::vector<EmbeddingVector>& reps) {
  PerspectiveSet set;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    Perspective p;
    p.id = static_cast<int>(i);
    p.label = "p" + std::to_string(i);
    p.representation = reps[i];
    set.perspectives.push_back(std::move(p));
  }
  return set;
}

EmbeddingVector basis(int dim, int at) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v[at] = 1.0;
  return {v};
}

}  // namespace

TEST_CASE("perspective_weights thresholds and keeps exact matches") {
  const EmbedderConfig embedder = hashing_config(16);
  const EmbeddingVector query_vec = embed_text("alpha", embedder);

  // p1 equals the query embedding; the others sit on untouched axes
  int untouched1 = -1, untouched2 = -1;
  for (int i = 0; i < 16 && untouched2 < 0; ++i) {
    if (query_vec.values[i] == 0.0) {
      (untouched1 < 0 ? untouched1 : untouched2) = i;
    }
  }
  const PerspectiveSet set = set_with_representations(
      {basis(16, untouched1), query_vec, basis(16, untouched2)});

  const PerspectiveVector vq =
      perspective_weights("alpha", set, 0.5, embedder);
  REQUIRE(vq.weights.size() == 3);
  CHECK(vq.weights[0] == 0.0);
  CHECK(vq.weights[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(vq.weights[2] == 0.0);
  CHECK_FALSE(vq.fallback_used);
}

TEST_CASE("perspective_weights falls back to the single best perspective") {
  const EmbedderConfig embedder = hashing_config(16);
  const EmbeddingVector query_vec = embed_text("alpha beta", embedder);
  const PerspectiveSet set =
      set_with_representations({query_vec, basis(16, 0), basis(16, 1)});

  const PerspectiveVector vq =
      perspective_weights("alpha beta", set, 0.999, embedder);
  const auto active = vq.active();
  REQUIRE(active.size() == 1);
  CHECK(active[0] == 0);
  CHECK(vq.fallback_used);
  CHECK(vq.fallback_index == 0);
}

TEST_CASE("perspective_weights matches a brute-force cosine oracle") {
  const EmbedderConfig embedder = hashing_config(64);
  const std::vector<std::string> labels = {"penalty", "symptom", "orchard",
                                           "galaxy"};
  std::vector<EmbeddingVector> reps;
  for (const auto& l : labels) reps.push_back(embed_text(l, embedder));
  const PerspectiveSet set = set_with_representations(reps);

  const std::string query = "penalty for tax fraud";
  const EmbeddingVector query_vec = embed_text(query, embedder);
  const double theta = 0.05;
  const PerspectiveVector vq = perspective_weights(query, set, theta, embedder);

  for (std::size_t i = 0; i < reps.size(); ++i) {
    double dot = 0.0, qn = 0.0, rn = 0.0;
    for (int d = 0; d < 64; ++d) {
      dot += query_vec.values[d] * reps[i].values[d];
      qn += query_vec.values[d] * query_vec.values[d];
      rn += reps[i].values[d] * reps[i].values[d];
    }
    const double expected = dot / std::sqrt(qn * rn);
    if (expected > theta) {
      CHECK(std::abs(vq.weights[i] - expected) <= 1e-9);
    } else {
      CHECK(vq.weights[i] == 0.0);
    }
  }
}

TEST_CASE("perspective_weights validates theta") {
  const EmbedderConfig embedder = hashing_config(16);
  const PerspectiveSet set = set_with_representations({basis(16, 0)});
  CHECK_THROWS_AS(perspective_weights("q", set, 1.0, embedder),
                  InvalidArgumentError);
  CHECK_THROWS_AS(perspective_weights("q", set, -1.5, embedder),
                  InvalidArgumentError);
}

TEST_CASE("raising the threshold never adds active perspectives") {
  const EmbedderConfig embedder = hashing_config(64);
  std::vector<EmbeddingVector> reps;
  for (const auto* l : {"court", "doctor", "farm", "star", "engine"}) {
    reps.push_back(embed_text(l, embedder));
  }
  const PerspectiveSet set = set_with_representations(reps);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> theta_dist(-0.5, 0.9);
  for (int trial = 0; trial < 100; ++trial) {
    double lo = theta_dist(rng);
    double hi = theta_dist(rng);
    if (lo > hi) std::swap(lo, hi);
    const auto active_lo =
        perspective_weights("court doctor star", set, lo, embedder).active();
    const auto active_hi =
        perspective_weights("court doctor star", set, hi, embedder).active();
    CHECK(std::includes(active_lo.begin(), active_lo.end(), active_hi.begin(),
                        active_hi.end()));
  }
}

TEST_CASE("nearest-rank percentile") {
  SUBCASE("ten evenly spaced scores") {
    std::vector<double> scores;
    for (int i = 0; i < 10; ++i) scores.push_back(i / 10.0);
    CHECK(nearest_rank_percentile(scores, 0.30) == doctest::Approx(0.2));
  }
  SUBCASE("constant distribution") {
    std::vector<double> scores(12, 0.37);
    CHECK(nearest_rank_percentile(scores, 0.30) == 0.37);
  }
  SUBCASE("bounds") {
    CHECK_THROWS_AS(nearest_rank_percentile({}, 0.3), InvalidArgumentError);
    CHECK_THROWS_AS(nearest_rank_percentile({1.0}, 0.0), InvalidArgumentError);
    CHECK_THROWS_AS(nearest_rank_percentile({1.0}, 1.0), InvalidArgumentError);
  }
}

TEST_CASE("calibrate_threshold pools scores and matches a sort oracle") {
  const EmbedderConfig embedder = hashing_config(64);
  std::vector<EmbeddingVector> reps;
  for (const auto* l : {"court", "doctor", "farm", "star"}) {
    reps.push_back(embed_text(l, embedder));
  }
  const PerspectiveSet set = set_with_representations(reps);

  std::vector<std::string> queries;
  for (int i = 0; i < 25; ++i) {
    queries.push_back("query about court and doctor number " +
                      std::to_string(i));
  }
  const ThresholdCalibration calibration =
      calibrate_threshold(queries, set, 0.30, embedder);
  CHECK(calibration.sample_size == 100);

  // oracle: full sort of the pooled 100 cosines
  std::vector<double> pooled;
  for (const auto& q : queries) {
    const EmbeddingVector qv = embed_text(q, embedder);
    for (const auto& r : reps) pooled.push_back(cosine(qv, r));
  }
  std::sort(pooled.begin(), pooled.end());
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.30 * 100.0));
  CHECK(calibration.theta == pooled[rank - 1]);
  CHECK(calibration.score_min == pooled.front());
  CHECK(calibration.score_max == pooled.back());
  CHECK(calibration.theta >= calibration.score_min);
  CHECK(calibration.theta <= calibration.score_max);
}

TEST_CASE("calibrate_threshold needs ten queries") {
  const EmbedderConfig embedder = hashing_config(16);
  const PerspectiveSet set = set_with_representations({basis(16, 0)});
  std::vector<std::string> nine(9, "query");
  CHECK_THROWS_AS(calibrate_threshold(nine, set, 0.30, embedder),
                  TooFewQueriesError);
}

TEST_CASE("normalize_for_display") {
  PerspectiveVector vq;
  SUBCASE("zeros stay zero, endpoints map to 0 and 1") {
    vq.weights = {0.0, 0.2, 0.6};
    CHECK(normalize_for_display(vq) == std::vector<double>{0.0, 0.0, 1.0});
  }
  SUBCASE("constant nonzero maps to ones") {
    vq.weights = {0.5, 0.5};
    CHECK(normalize_for_display(vq) == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("linear interpolation") {
    vq.weights = {0.1, 0.4, 0.7};
    const auto out = normalize_for_display(vq);
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(0.5));
    CHECK(out[2] == doctest::Approx(1.0));
  }
  SUBCASE("all-zero vector is preserved") {
    vq.weights = {0.0, 0.0};
    CHECK(normalize_for_display(vq) == std::vector<double>{0.0, 0.0});
  }
}
