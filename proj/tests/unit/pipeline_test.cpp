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

#include "doctest.h"
#include "mvrag/error.hpp"
#include "test_support.hpp"

using namespace mvrag;

TEST_CASE("run_query produces a complete trace") {
  const PlantedBenchmark bench = test::small_fixture();
  const PipelineConfig config = test::planted_config();
  const PerspectiveSet set = extract_perspectives(bench.corpus, config);
  const VectorIndex index = build_index(bench.corpus, config.embedder);

  const QueryTrace trace = run_query(bench.queries[0].text, set, index,
                                     bench.corpus, config, true);
  CHECK(trace.vq.weights.size() == set.size());
  CHECK(trace.rewrites.entries.size() == trace.vq.active().size());
  CHECK(trace.hits.size() == trace.rewrites.entries.size());
  CHECK_FALSE(trace.reranked.empty());
  CHECK(trace.prompt.doc_ids.size() == trace.reranked.size());
  REQUIRE(trace.answer.has_value());
  // the mock reader cites the top-ranked document
  CHECK(trace.answer->find(trace.reranked.front().doc_id) !=
        std::string::npos);

  // prompt document order equals relevance order
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < trace.prompt.doc_ids.size(); ++i) {
    CHECK(trace.prompt.doc_ids[i] == trace.reranked[i].doc_id);
    const std::string marker = "Reference [" + std::to_string(i + 1) + "]:";
    const auto at = trace.prompt.text.find(marker, cursor);
    REQUIRE(at != std::string::npos);
    cursor = at;
  }

  SUBCASE("skipping the reader leaves the answer empty") {
    const QueryTrace headless = run_query(bench.queries[0].text, set, index,
                                          bench.corpus, config, false);
    CHECK_FALSE(headless.answer.has_value());
    CHECK(trace_json(headless)["answer"].is_null());
  }

  SUBCASE("traces are byte-identical across runs") {
    const QueryTrace again = run_query(bench.queries[0].text, set, index,
                                       bench.corpus, config, true);
    CHECK(trace_json(trace).dump(2) == trace_json(again).dump(2));
  }
}

TEST_CASE("run_query requires a threshold") {
  const PlantedBenchmark bench = test::small_fixture();
  PipelineConfig config = test::planted_config();
  const PerspectiveSet set = extract_perspectives(bench.corpus, config);
  const VectorIndex index = build_index(bench.corpus, config.embedder);
  config.theta = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(run_query(bench.queries[0].text, set, index, bench.corpus,
                            config, false),
                  InvalidArgumentError);
}

TEST_CASE("pipeline errors carry the failing stage name") {
  const PlantedBenchmark bench = test::small_fixture();
  PipelineConfig config = test::planted_config();
  config.embedder.provider = EmbedderProvider::remote;  // no endpoint set
  try {
    extract_perspectives(bench.corpus, config);
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "embed_corpus");
    CHECK(std::string(e.what()).find("embed_corpus") == 0);
  }
}

TEST_CASE("extract_perspectives records stage timings") {
  const PlantedBenchmark bench = test::small_fixture();
  StageTimings timings;
  extract_perspectives(bench.corpus, test::planted_config(), &timings);
  REQUIRE(timings.size() >= 7);
  CHECK(timings.front().first == "embed_corpus");
  for (const auto& [stage, seconds] : timings) {
    CHECK(seconds >= 0.0);
  }
}
