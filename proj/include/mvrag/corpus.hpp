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

#include <Eigen/SparseCore>
#include <map>
#include <string>
#include <vector>

namespace mvrag {

struct Document {
  std::string id;
  std::string text;
  std::map<std::string, std::string> metadata;
};

/// Ordered document collection. Row i of every derived matrix refers to
/// documents[i]; the order never changes after loading.
struct Corpus {
  std::vector<Document> documents;
  std::string source_path;

  std::size_t size() const { return documents.size(); }
};

struct TokenizerConfig {
  bool lowercase = true;          // ASCII lowercasing
  bool cjk_per_codepoint = true;  // every Han/kana/hangul code point is a token
};

struct VocabConfig {
  int min_df = 2;
  int max_terms = 50000;
  bool bigrams = true;
  TokenizerConfig tokenizer;
};

/// Term inventory: unigrams plus space-joined bigrams, ordered by descending
/// document frequency (ties lexicographic). The order is the column order of
/// the document-term matrix.
struct Vocabulary {
  std::vector<std::string> terms;
  std::map<std::string, int> index;  // term -> column
  std::vector<int> df;               // document frequency, aligned with terms
  VocabConfig config;                // settings the vocabulary was built with

  int size() const { return static_cast<int>(terms.size()); }
};

/// Sparse tf-idf matrix, one row per document, rows L2-normalized.
struct DocTermMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Loads a UTF-8 JSONL corpus: one object per line with fields `id`, `text`
/// and optional `metadata`; unknown keys are ignored.
Corpus load_corpus(const std::string& path);

/// Lowercased tokens split on word boundaries. CJK text is segmented per code
/// point; punctuation is dropped. Empty input yields an empty list.
std::vector<std::string> tokenize(const std::string& text,
                                  const TokenizerConfig& config = {});

/// Space-joined adjacent token pairs, in order.
std::vector<std::string> bigrams(const std::vector<std::string>& tokens);

Vocabulary build_vocabulary(const Corpus& corpus, const VocabConfig& config = {});

/// tf(i,j) * idf(j) with raw-count tf and idf(j) = ln((1+|C|)/(1+df_j)) + 1,
/// rows L2-normalized.
DocTermMatrix build_tfidf(const Corpus& corpus, const Vocabulary& vocab);

/// Content hash over document ids and texts, as a fixed-width hex string.
std::string corpus_fingerprint(const Corpus& corpus);

}  // namespace mvrag
