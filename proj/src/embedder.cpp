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

#include "mvrag/embedder.hpp"

#include <algorithm>
#include <cmath>

#include "http_client.hpp"
#include "mvrag/error.hpp"

namespace mvrag {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

EmbeddingVector hash_embed(const std::vector<std::string>& tokens, int dim,
                           std::uint64_t seed) {
  if (dim < 8) {
    throw InvalidArgumentError("hash_embed: dim must be >= 8");
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
  for (const auto& token : tokens) {
    const std::uint64_t h = fnv1a64(token, seed);
    const auto bucket = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim));
    const double sign = ((h >> 32) & 1ULL) ? 1.0 : -1.0;
    acc[bucket] += sign;
  }
  const double norm = acc.norm();
  if (norm == 0.0) {
    acc.setZero();
    acc[0] = 1.0;
    return {acc};
  }
  acc /= norm;
  return {acc};
}

EmbeddingVector normalized(const EmbeddingVector& v) {
  const double norm = v.values.norm();
  if (norm == 0.0) {
    throw ZeroVectorError("cannot normalize a zero vector");
  }
  return {v.values / norm};
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw DimMismatchError("cosine: dims " + std::to_string(a.dim()) + " vs " +
                           std::to_string(b.dim()));
  }
  const double na = a.values.norm();
  const double nb = b.values.norm();
  if (na == 0.0 || nb == 0.0) {
    throw ZeroVectorError("cosine of a zero vector is undefined");
  }
  return a.values.dot(b.values) / (na * nb);
}

namespace {

std::vector<EmbeddingVector> embed_remote(const std::vector<std::string>& texts,
                                          const EmbedderConfig& config) {
  internal::HttpRequestOptions options;
  options.endpoint = config.endpoint;
  options.path = "/embeddings";
  options.api_key_env = config.api_key_env;
  options.timeout_ms = config.timeout_ms;
  options.max_retries = config.max_retries;
  options.retry_backoff_ms = config.retry_backoff_ms;

  std::vector<EmbeddingVector> out(texts.size());
  const std::size_t batch = std::max(1, config.batch_size);
  for (std::size_t start = 0; start < texts.size(); start += batch) {
    const std::size_t end = std::min(texts.size(), start + batch);
    nlohmann::json body;
    body["model"] = config.model;
    body["input"] = std::vector<std::string>(texts.begin() + start,
                                             texts.begin() + end);
    nlohmann::json response = internal::post_json(options, body);
    if (!response.contains("data") || !response["data"].is_array() ||
        response["data"].size() != end - start) {
      throw ProviderError("embeddings response has wrong shape");
    }
    for (const auto& item : response["data"]) {
      if (!item.contains("index") || !item.contains("embedding")) {
        throw ProviderError("embeddings response item missing index/embedding");
      }
      const auto index = item["index"].get<std::size_t>();
      if (index >= end - start) {
        throw ProviderError("embeddings response index out of range");
      }
      const auto& raw = item["embedding"];
      Eigen::VectorXd values(raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) {
        values[static_cast<Eigen::Index>(i)] = raw[i].get<double>();
      }
      out[start + index] = {values};
    }
  }

  const int dim = out.empty() ? 0 : out.front().dim();
  for (auto& v : out) {
    if (v.dim() != dim) {
      throw DimMismatchError("remote embeddings returned inconsistent dims");
    }
    if (!v.values.allFinite()) {
      throw ProviderError("remote embedding contains non-finite values");
    }
    v = normalized(v);
  }
  return out;
}

}  // namespace

std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts,
                                         const EmbedderConfig& config) {
  if (texts.empty()) {
    throw InvalidArgumentError("embed_texts: texts must be non-empty");
  }
  if (config.provider == EmbedderProvider::remote) {
    return embed_remote(texts, config);
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    out.push_back(
        hash_embed(tokenize(text, config.tokenizer), config.dim, config.seed));
  }
  return out;
}

EmbeddingVector embed_text(const std::string& text,
                           const EmbedderConfig& config) {
  return embed_texts({text}, config).front();
}

}  // namespace mvrag
