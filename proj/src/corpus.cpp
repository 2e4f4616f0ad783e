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

#include "mvrag/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <unordered_set>

#include "mvrag/error.hpp"
#include "json.hpp"

namespace mvrag {

namespace {

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

// Decodes the UTF-8 code point starting at `i`, advancing `i` past it.
// Malformed bytes are consumed one at a time and reported as U+FFFD.
char32_t next_codepoint(const std::string& s, std::size_t& i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(s[k]);
  };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    if ((byte(i + k) & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (byte(i + k) & 0x3F);
  }
  i += len;
  return cp;
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x3400 && cp <= 0x4DBF) ||    // CJK extension A
         (cp >= 0x4E00 && cp <= 0x9FFF) ||    // CJK unified
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
         (cp >= 0x20000 && cp <= 0x2A6DF) ||  // CJK extension B
         (cp >= 0x3040 && cp <= 0x309F) ||    // hiragana
         (cp >= 0x30A0 && cp <= 0x30FF) ||    // katakana
         (cp >= 0xAC00 && cp <= 0xD7AF) ||    // hangul syllables
         (cp >= 0x1100 && cp <= 0x11FF);      // hangul jamo
}

bool is_punct_block(char32_t cp) {
  return (cp >= 0x2000 && cp <= 0x206F) ||  // general punctuation
         (cp >= 0x3000 && cp <= 0x303F) ||  // CJK symbols and punctuation
         (cp >= 0xFF00 && cp <= 0xFFEF) ||  // fullwidth / halfwidth forms
         (cp >= 0x00A0 && cp <= 0x00BF);    // latin-1 punctuation and symbols
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open corpus file: " + path);
  }

  Corpus corpus;
  corpus.source_path = path;
  std::unordered_set<std::string> seen_ids;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw FormatError("line " + std::to_string(lineno) +
                        ": expected a JSON object");
    }
    if (!obj.contains("id") || !obj["id"].is_string()) {
      throw FormatError("line " + std::to_string(lineno) +
                        ": missing string field \"id\"");
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
      throw FormatError("line " + std::to_string(lineno) +
                        ": missing string field \"text\"");
    }

    Document doc;
    doc.id = obj["id"].get<std::string>();
    doc.text = obj["text"].get<std::string>();
    if (doc.id.empty()) {
      throw FormatError("line " + std::to_string(lineno) + ": empty id");
    }
    if (is_blank(doc.text)) {
      throw FormatError("line " + std::to_string(lineno) +
                        ": document text is empty");
    }
    if (obj.contains("metadata")) {
      const auto& meta = obj["metadata"];
      if (!meta.is_object()) {
        throw FormatError("line " + std::to_string(lineno) +
                          ": metadata must be an object");
      }
      for (auto it = meta.begin(); it != meta.end(); ++it) {
        if (!it.value().is_string()) {
          throw FormatError("line " + std::to_string(lineno) +
                            ": metadata value for \"" + it.key() +
                            "\" must be a string");
        }
        doc.metadata[it.key()] = it.value().get<std::string>();
      }
    }
    if (!seen_ids.insert(doc.id).second) {
      throw DuplicateIdError("duplicate document id \"" + doc.id + "\" at line " +
                             std::to_string(lineno));
    }
    corpus.documents.push_back(std::move(doc));
  }

  if (corpus.documents.empty()) {
    throw FormatError("corpus must contain >=1 document: " + path);
  }
  return corpus;
}

std::vector<std::string> tokenize(const std::string& text,
                                  const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };

  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = next_codepoint(text, i);
    if (cp < 0x80) {
      unsigned char c = static_cast<unsigned char>(cp);
      if (std::isalnum(c)) {
        current.push_back(config.lowercase
                              ? static_cast<char>(std::tolower(c))
                              : static_cast<char>(c));
      } else {
        flush();
      }
      continue;
    }
    if (cp == 0xFFFD || is_punct_block(cp)) {
      flush();
      continue;
    }
    if (config.cjk_per_codepoint && is_cjk(cp)) {
      flush();
      std::string single;
      append_utf8(single, cp);
      tokens.push_back(std::move(single));
      continue;
    }
    // Other non-ASCII letters stay part of the current word, case untouched.
    append_utf8(current, cp);
  }
  flush();
  return tokens;
}

std::vector<std::string> bigrams(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  if (tokens.size() < 2) return out;
  out.reserve(tokens.size() - 1);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    out.push_back(tokens[i] + " " + tokens[i + 1]);
  }
  return out;
}

namespace {

std::set<std::string> doc_term_set(const Document& doc,
                                   const VocabConfig& config) {
  std::vector<std::string> tokens = tokenize(doc.text, config.tokenizer);
  std::set<std::string> terms(tokens.begin(), tokens.end());
  if (config.bigrams) {
    for (auto& bg : bigrams(tokens)) terms.insert(std::move(bg));
  }
  return terms;
}

}  // namespace

Vocabulary build_vocabulary(const Corpus& corpus, const VocabConfig& config) {
  if (corpus.documents.empty()) {
    throw InvalidArgumentError("build_vocabulary: corpus is empty");
  }

  std::map<std::string, int> df;
  for (const auto& doc : corpus.documents) {
    for (const auto& term : doc_term_set(doc, config)) {
      ++df[term];
    }
  }

  std::vector<std::pair<std::string, int>> kept;
  for (const auto& [term, count] : df) {
    if (count >= config.min_df) kept.emplace_back(term, count);
  }
  if (kept.empty()) {
    throw EmptyVocabularyError("no term reaches min_df=" +
                               std::to_string(config.min_df));
  }

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(kept.size()) > config.max_terms) {
    kept.resize(config.max_terms);
  }

  Vocabulary vocab;
  vocab.config = config;
  vocab.terms.reserve(kept.size());
  vocab.df.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    vocab.terms.push_back(kept[i].first);
    vocab.df.push_back(kept[i].second);
    vocab.index[kept[i].first] = static_cast<int>(i);
  }
  return vocab;
}

DocTermMatrix build_tfidf(const Corpus& corpus, const Vocabulary& vocab) {
  if (vocab.terms.empty() || vocab.terms.size() != vocab.df.size() ||
      vocab.terms.size() != vocab.index.size()) {
    throw ShapeMismatchError("build_tfidf: inconsistent vocabulary");
  }
  const auto n_docs = static_cast<Eigen::Index>(corpus.size());
  const auto n_terms = static_cast<Eigen::Index>(vocab.size());
  if (n_docs == 0) {
    throw ShapeMismatchError("build_tfidf: empty corpus");
  }

  const double n = static_cast<double>(n_docs);
  std::vector<double> idf(vocab.df.size());
  for (std::size_t j = 0; j < vocab.df.size(); ++j) {
    idf[j] = std::log((1.0 + n) / (1.0 + vocab.df[j])) + 1.0;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index i = 0; i < n_docs; ++i) {
    std::vector<std::string> tokens =
        tokenize(corpus.documents[i].text, vocab.config.tokenizer);
    std::map<int, double> tf;
    const auto count = [&](const std::string& term) {
      auto it = vocab.index.find(term);
      if (it != vocab.index.end()) tf[it->second] += 1.0;
    };
    for (const auto& t : tokens) count(t);
    if (vocab.config.bigrams) {
      for (const auto& bg : bigrams(tokens)) count(bg);
    }

    double norm_sq = 0.0;
    for (auto& [col, value] : tf) {
      value *= idf[col];
      norm_sq += value * value;
    }
    const double norm = std::sqrt(norm_sq);
    for (const auto& [col, value] : tf) {
      triplets.emplace_back(i, col, norm > 0.0 ? value / norm : 0.0);
    }
  }

  DocTermMatrix matrix;
  matrix.values.resize(n_docs, n_terms);
  matrix.values.setFromTriplets(triplets.begin(), triplets.end());
  matrix.values.makeCompressed();
  return matrix;
}

std::string corpus_fingerprint(const Corpus& corpus) {
  // FNV-1a over ids and texts with field/record separators.
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& doc : corpus.documents) {
    mix(doc.id);
    h ^= 0x1F;
    h *= 1099511628211ULL;
    mix(doc.text);
    h ^= 0x1E;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace mvrag
