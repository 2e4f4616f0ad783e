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

#include "mvrag/retrieval.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "mvrag/error.hpp"

namespace mvrag {

VectorIndex build_index(const Corpus& corpus, const EmbedderConfig& embedder) {
  if (corpus.documents.empty()) {
    throw InvalidArgumentError("build_index: corpus is empty");
  }
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& doc : corpus.documents) texts.push_back(doc.text);

  VectorIndex index;
  index.doc_ids.reserve(corpus.size());
  for (const auto& doc : corpus.documents) index.doc_ids.push_back(doc.id);

  const auto vectors = embed_texts(texts, embedder);
  const int dim = vectors.front().dim();
  index.vectors.resize(static_cast<Eigen::Index>(vectors.size()), dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    Eigen::VectorXf row = vectors[i].values.cast<float>();
    const float norm = row.norm();
    if (norm > 0.0f) row /= norm;  // re-unit after the float32 cast
    index.vectors.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return index;
}

std::vector<RetrievalHit> search(const VectorIndex& index,
                                 const EmbeddingVector& query, int k) {
  if (k < 1) {
    throw InvalidArgumentError("search: k must be >= 1");
  }
  if (query.dim() != index.dim()) {
    throw DimMismatchError("search: query dim " + std::to_string(query.dim()) +
                           " vs index dim " + std::to_string(index.dim()));
  }

  const Eigen::Index n = index.vectors.rows();
  std::vector<std::pair<double, std::size_t>> scored(n);
  const Eigen::VectorXf q = query.values.cast<float>();
  for (Eigen::Index i = 0; i < n; ++i) {
    // double accumulation over float rows keeps scoring deterministic
    double dot = 0.0;
    for (Eigen::Index d = 0; d < index.vectors.cols(); ++d) {
      dot += static_cast<double>(index.vectors(i, d)) * static_cast<double>(q[d]);
    }
    scored[i] = {dot, static_cast<std::size_t>(i)};
  }

  const auto better = [&](const std::pair<double, std::size_t>& a,
                          const std::pair<double, std::size_t>& b) {
    if (a.first != b.first) return a.first > b.first;
    return index.doc_ids[a.second] < index.doc_ids[b.second];
  };
  const std::size_t take = std::min<std::size_t>(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(), better);

  std::vector<RetrievalHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    RetrievalHit hit;
    hit.doc_id = index.doc_ids[scored[i].second];
    hit.similarity = scored[i].first;
    hit.rank = static_cast<int>(i + 1);
    hits.push_back(std::move(hit));
  }
  return hits;
}

std::map<int, std::vector<RetrievalHit>> multi_view_retrieve(
    const RewriteSet& rewrites, const VectorIndex& index, int k,
    const EmbedderConfig& embedder) {
  if (k < 1) {
    throw InvalidArgumentError("multi_view_retrieve: k must be >= 1");
  }
  if (rewrites.entries.empty()) {
    throw InvalidArgumentError("multi_view_retrieve: no rewrites");
  }

  std::vector<std::string> texts;
  texts.reserve(rewrites.entries.size());
  for (const auto& entry : rewrites.entries) texts.push_back(entry.content);
  const auto vectors = embed_texts(texts, embedder);

  std::map<int, std::vector<RetrievalHit>> result;
  for (std::size_t i = 0; i < rewrites.entries.size(); ++i) {
    auto hits = search(index, vectors[i], k);
    for (auto& hit : hits) hit.perspective_id = rewrites.entries[i].perspective_id;
    result[rewrites.entries[i].perspective_id] = std::move(hits);
  }
  return result;
}

namespace {

constexpr char kMagic[4] = {'M', 'V', 'R', 'G'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f32(std::ostream& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  write_u32(out, bits);
}

float read_f32(std::istream& in) {
  const std::uint32_t bits = read_u32(in);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

void save_index(const VectorIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write index file: " + path);
  }
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u64(out, index.size());
  write_u32(out, static_cast<std::uint32_t>(index.dim()));
  for (const auto& id : index.doc_ids) {
    write_u32(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (Eigen::Index i = 0; i < index.vectors.rows(); ++i) {
    for (Eigen::Index d = 0; d < index.vectors.cols(); ++d) {
      write_f32(out, index.vectors(i, d));
    }
  }
  if (!out) {
    throw IoError("failed writing index file: " + path);
  }
}

VectorIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open index file: " + path);
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("not an index file (bad magic): " + path);
  }
  const std::uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw FormatError("unsupported index version " + std::to_string(version));
  }
  const std::uint64_t size = read_u64(in);
  const std::uint32_t dim = read_u32(in);
  if (!in) {
    throw FormatError("truncated index header: " + path);
  }

  VectorIndex index;
  index.doc_ids.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    const std::uint32_t len = read_u32(in);
    std::string id(len, '\0');
    in.read(id.data(), len);
    if (!in) {
      throw FormatError("truncated doc-id table: " + path);
    }
    index.doc_ids.push_back(std::move(id));
  }
  index.vectors.resize(static_cast<Eigen::Index>(size), dim);
  for (Eigen::Index i = 0; i < index.vectors.rows(); ++i) {
    for (Eigen::Index d = 0; d < index.vectors.cols(); ++d) {
      index.vectors(i, d) = read_f32(in);
    }
  }
  if (!in) {
    throw FormatError("truncated vector data: " + path);
  }
  return index;
}

}  // namespace mvrag
