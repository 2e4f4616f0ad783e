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

#include "mvrag/decomposition.hpp"
#include "mvrag/embedder.hpp"

namespace mvrag {

/// What the representation vector of a perspective holds: the embedding of
/// its label term (default) or the principal component it came from.
enum class PerspectiveRepresentation { term, component };

struct Perspective {
  int id = 0;
  std::string label;               // assigned topic term
  EmbeddingVector representation;  // L2-normalized
  int component_index = 0;         // source principal component
  double alignment_score = 0.0;    // cosine at assignment time
};

struct PerspectiveSet {
  std::vector<Perspective> perspectives;
  std::string corpus_fingerprint;

  // creation parameters, persisted with the set
  double variance_target = 0.90;
  int r = 0;
  int k_terms = 10;
  std::uint64_t seed = 42;
  EmbedderConfig embedder;
  PerspectiveRepresentation representation = PerspectiveRepresentation::term;

  std::size_t size() const { return perspectives.size(); }
};

/// Assigns each principal component its best-aligned candidate topic term by
/// cosine similarity. Components are processed in descending explained
/// variance order and each takes its best not-yet-assigned term, so labels
/// are unique; exact ties go to the lexicographically smallest term.
PerspectiveSet align_perspectives(
    const PcaModel& pca, const TopicTerms& terms, const EmbedderConfig& embedder,
    PerspectiveRepresentation representation = PerspectiveRepresentation::term);

void save_perspectives(const PerspectiveSet& set, const std::string& path);

/// Loads a persisted set. When a corpus is given and verification is on, a
/// fingerprint mismatch raises FingerprintMismatchError; pass
/// verify_fingerprint=false to override.
PerspectiveSet load_perspectives(const std::string& path,
                                 const Corpus* corpus = nullptr,
                                 bool verify_fingerprint = true);

}  // namespace mvrag
