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

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mvrag/corpus.hpp"

namespace mvrag {

struct QueryRecord {
  std::string id;
  std::string text;
};

/// Binary relevance judgments: query id -> relevant doc ids.
struct Qrels {
  std::map<std::string, std::set<std::string>> relevant;
};

/// Construction parameters for the planted-facet benchmark corpus.
///
/// Facets have disjoint vocabularies: one head term present in every facet
/// document, a pool of generic tail terms, and per-query unique terms shared
/// only between a query and its relevant document in that facet. Queries are
/// surface-biased toward facet 0 (facet-0 head repeats and facet-0 generic
/// terms) while being relevant to exactly one document per facet. Facet-0
/// distractors share the query's generic vocabulary and mask the other
/// facets' relevant documents in single-vector retrieval; perspective-wise
/// rewrites recover them.
struct PlantedFacetSpec {
  int n_facets = 3;
  int queries = 30;
  int distractors_per_facet = 70;
  int tail_pool = 40;           // generic tail terms per facet
  int doc_tail_terms = 8;       // generic tails per distractor document
  int rel_generic_terms = 4;    // generic tails per relevant document
  int query_generic_terms = 6;  // facet-0 generics embedded in each query
  int uniques_per_facet = 4;    // query-specific terms per facet
  int head_repeat = 3;          // head count in relevant documents
  int masker_head_repeat = 2;   // head count in facet-0 distractors
  int distractor_head_repeat = 1;  // head count in other distractors
  int query_head_bias = 2;      // facet-0 head count in each query
  std::uint64_t seed = 7;
};

struct PlantedBenchmark {
  Corpus corpus;
  std::vector<QueryRecord> queries;
  Qrels qrels;
  std::map<std::string, int> doc_facet;  // doc id -> facet
  std::vector<std::string> head_terms;   // facet heads, index = facet
};

/// Deterministic generator for the planted-facet benchmark. Corpus size is
/// n_facets * (queries + distractors_per_facet).
PlantedBenchmark make_planted_benchmark(const PlantedFacetSpec& spec = {});

/// Writes the benchmark corpus as JSONL (the regular corpus format).
void write_corpus_jsonl(const Corpus& corpus, const std::string& path);

/// Writes queries as "id<TAB>text" lines and qrels in TREC format.
void write_queries_tsv(const std::vector<QueryRecord>& queries,
                       const std::string& path);
void write_qrels(const Qrels& qrels, const std::string& path);

}  // namespace mvrag
