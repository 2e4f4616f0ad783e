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
#include <string>
#include <string_view>
#include <vector>

#include "mvrag/corpus.hpp"

namespace mvrag {

enum class EmbedderProvider { hashing, remote };

struct EmbedderConfig {
  EmbedderProvider provider = EmbedderProvider::hashing;

  // hashing provider
  int dim = 256;
  std::uint64_t seed = 42;
  TokenizerConfig tokenizer;

  // remote provider (OpenAI-compatible embeddings endpoint)
  std::string endpoint;  // e.g. "http://127.0.0.1:8080/v1"
  std::string model;
  std::string api_key_env = "MVRAG_API_KEY";
  int batch_size = 16;
  int timeout_ms = 30000;
  int max_retries = 3;
  int retry_backoff_ms = 500;
  int max_in_flight = 4;
};

struct EmbeddingVector {
  Eigen::VectorXd values;

  int dim() const { return static_cast<int>(values.size()); }
};

/// FNV-1a 64-bit over the bytes of `data`, with the initial state XORed with
/// `seed`. The embedder's bucket/sign hash; stable across platforms.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed);

/// Deterministic bag-of-tokens embedding: each token maps to a bucket in
/// 0..dim-1 and a sign in {-1,+1}; signed counts are accumulated and the
/// vector L2-normalized. An all-zero accumulation yields the basis vector e0.
EmbeddingVector hash_embed(const std::vector<std::string>& tokens, int dim,
                           std::uint64_t seed);

/// One L2-normalized vector per input text, same order. The remote provider
/// batches requests and retries transient failures.
std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts,
                                         const EmbedderConfig& config);

EmbeddingVector embed_text(const std::string& text,
                           const EmbedderConfig& config);

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

EmbeddingVector normalized(const EmbeddingVector& v);

}  // namespace mvrag
