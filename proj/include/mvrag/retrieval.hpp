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
#include <map>
#include <string>
#include <vector>

#include "mvrag/embedder.hpp"
#include "mvrag/rewriter.hpp"

namespace mvrag {

/// Exact cosine index: one unit-norm float32 row per corpus document.
struct VectorIndex {
  std::vector<std::string> doc_ids;
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> vectors;

  int dim() const { return static_cast<int>(vectors.cols()); }
  std::size_t size() const { return doc_ids.size(); }
};

struct RetrievalHit {
  std::string doc_id;
  double similarity = 0.0;
  int rank = 0;  // 1-based within its hit list
  int perspective_id = -1;
};

VectorIndex build_index(const Corpus& corpus, const EmbedderConfig& embedder);

/// Exhaustive top-k by cosine; ties break by ascending doc id. Returns all
/// documents when k exceeds the index size.
std::vector<RetrievalHit> search(const VectorIndex& index,
                                 const EmbeddingVector& query, int k);

/// Embeds each rewritten query and searches per perspective. Result sets may
/// overlap across perspectives; deduplication happens in re-ranking.
std::map<int, std::vector<RetrievalHit>> multi_view_retrieve(
    const RewriteSet& rewrites, const VectorIndex& index, int k,
    const EmbedderConfig& embedder);

/// Binary format: magic "MVRG", version u32, size u64, dim u32, a doc-id
/// table of (u32 length, bytes) entries, then the row-major little-endian
/// float32 matrix.
void save_index(const VectorIndex& index, const std::string& path);
VectorIndex load_index(const std::string& path);

}  // namespace mvrag
