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

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mvrag/error.hpp"
#include "test_support.hpp"

using namespace mvrag;
using mvrag::test::TempDir;

namespace {

// Independent tf-idf reference: plain maps and direct counting, no shared
// code with the library path beyond the tokenizer contract.
std::map<std::pair<int, std::string>, double> reference_tfidf(
    const Corpus& corpus, const VocabConfig& config) {
  std::vector<std::vector<std::string>> doc_terms;
  for (const auto& doc : corpus.documents) {
    auto tokens = tokenize(doc.text, config.tokenizer);
    std::vector<std::string> terms = tokens;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      terms.push_back(tokens[i] + " " + tokens[i + 1]);
    }
    doc_terms.push_back(std::move(terms));
  }

  std::map<std::string, int> df;
  for (const auto& terms : doc_terms) {
    std::set<std::string> unique(terms.begin(), terms.end());
    for (const auto& t : unique) ++df[t];
  }
  std::set<std::string> kept;
  for (const auto& [term, count] : df) {
    if (count >= config.min_df) kept.insert(term);
  }

  const double n = static_cast<double>(corpus.size());
  std::map<std::pair<int, std::string>, double> cells;
  for (int i = 0; i < static_cast<int>(corpus.size()); ++i) {
    std::map<std::string, double> weights;
    for (const auto& term : doc_terms[i]) {
      if (!kept.count(term)) continue;
      weights[term] += 1.0;
    }
    double norm_sq = 0.0;
    for (auto& [term, w] : weights) {
      w *= std::log((1.0 + n) / (1.0 + df[term])) + 1.0;
      norm_sq += w * w;
    }
    const double norm = std::sqrt(norm_sq);
    for (const auto& [term, w] : weights) {
      cells[{i, term}] = norm > 0 ? w / norm : 0.0;
    }
  }
  return cells;
}

Corpus make_corpus(const std::vector<std::string>& texts) {
  Corpus corpus;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    corpus.documents.push_back({"doc" + std::to_string(i), texts[i], {}});
  }
  return corpus;
}

}  // namespace

TEST_CASE("load_corpus reads documents in file order") {
  TempDir tmp;
  const std::string path = tmp.file("corpus.jsonl");
  test::write_file(path,
                   "{\"id\":\"a\",\"text\":\"first doc\"}\n"
                   "{\"id\":\"b\",\"text\":\"second doc\",\"metadata\":{\"k\":\"v\"},\"extra\":1}\n"
                   "{\"id\":\"c\",\"text\":\"third doc\"}\n");
  const Corpus corpus = load_corpus(path);
  REQUIRE(corpus.size() == 3);
  CHECK(corpus.documents[0].id == "a");
  CHECK(corpus.documents[1].id == "b");
  CHECK(corpus.documents[2].id == "c");
  CHECK(corpus.documents[1].metadata.at("k") == "v");  // unknown keys ignored
}

TEST_CASE("load_corpus rejects duplicate ids naming the id") {
  TempDir tmp;
  const std::string path = tmp.file("dups.jsonl");
  test::write_file(path,
                   "{\"id\":\"d1\",\"text\":\"x\"}\n"
                   "{\"id\":\"d1\",\"text\":\"y\"}\n");
  CHECK_THROWS_WITH_AS(load_corpus(path),
                       doctest::Contains("d1"), DuplicateIdError);
}

TEST_CASE("load_corpus errors") {
  TempDir tmp;
  SUBCASE("empty file") {
    const std::string path = tmp.file("empty.jsonl");
    test::write_file(path, "");
    CHECK_THROWS_WITH_AS(load_corpus(path),
                         doctest::Contains("corpus must contain >=1 document"),
                         FormatError);
  }
  SUBCASE("malformed line reports the line number") {
    const std::string path = tmp.file("bad.jsonl");
    test::write_file(path, "{\"id\":\"a\",\"text\":\"ok\"}\n{oops\n");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("line 2"),
                         FormatError);
  }
  SUBCASE("blank text rejected") {
    const std::string path = tmp.file("blank.jsonl");
    test::write_file(path, "{\"id\":\"a\",\"text\":\"  \"}\n");
    CHECK_THROWS_AS(load_corpus(path), FormatError);
  }
  SUBCASE("unreadable path") {
    CHECK_THROWS_AS(load_corpus(tmp.file("missing/nope.jsonl")), IoError);
  }
}

TEST_CASE("tokenize lowercases and splits on word boundaries") {
  CHECK(tokenize("Focus of Dispute") ==
        std::vector<std::string>{"focus", "of", "dispute"});
  CHECK(tokenize("a-b_c.d") == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  ,;!  ").empty());
}

TEST_CASE("tokenize segments CJK per code point") {
  CHECK(tokenize("刑事责任") ==
        std::vector<std::string>{"刑", "事", "责", "任"});
  CHECK(tokenize("medical刑事history") ==
        std::vector<std::string>{"medical", "刑", "事", "history"});
  // fullwidth punctuation is dropped
  CHECK(tokenize("刑，事") == std::vector<std::string>{"刑", "事"});
}

TEST_CASE("build_vocabulary keeps unigrams and bigrams above min_df") {
  const Corpus corpus = make_corpus(
      {"medical history report", "medical history summary", "other words"});
  const Vocabulary vocab = build_vocabulary(corpus);
  CHECK(vocab.index.count("medical"));
  CHECK(vocab.index.count("history"));
  CHECK(vocab.index.count("medical history"));
  CHECK_FALSE(vocab.index.count("report"));  // df 1 < min_df 2
  CHECK_FALSE(vocab.index.count("other"));
}

TEST_CASE("build_vocabulary with no surviving term") {
  const Corpus corpus = make_corpus({"alpha beta", "gamma delta", "eps zeta"});
  CHECK_THROWS_AS(build_vocabulary(corpus), EmptyVocabularyError);
}

TEST_CASE("build_vocabulary truncates by df then lexicographic") {
  const Corpus corpus =
      make_corpus({"aa bb cc", "aa bb cc", "aa bb", "aa"});
  VocabConfig config;
  config.bigrams = false;
  config.max_terms = 2;
  const Vocabulary vocab = build_vocabulary(corpus, config);
  REQUIRE(vocab.size() == 2);
  CHECK(vocab.terms[0] == "aa");  // df 4
  CHECK(vocab.terms[1] == "bb");  // df 3
  CHECK(vocab.df[0] == 4);
}

TEST_CASE("build_tfidf on identical one-word docs") {
  const Corpus corpus = make_corpus({"a", "a"});
  const Vocabulary vocab = build_vocabulary(corpus);
  const DocTermMatrix X = build_tfidf(corpus, vocab);
  REQUIRE(X.rows() == 2);
  REQUIRE(X.cols() == 1);
  CHECK(X.values.coeff(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(X.values.coeff(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_tfidf matches the brute-force reference on the toy fixture") {
  const Corpus corpus = load_corpus(test::testdata("tfidf_toy.jsonl"));
  const Vocabulary vocab = build_vocabulary(corpus);
  const DocTermMatrix X = build_tfidf(corpus, vocab);

  const auto reference = reference_tfidf(corpus, vocab.config);

  // every vocabulary cell agrees within 1e-9, absent terms are exactly zero
  std::size_t nonzero = 0;
  for (int i = 0; i < X.rows(); ++i) {
    for (int j = 0; j < vocab.size(); ++j) {
      const double actual = X.values.coeff(i, j);
      auto it = reference.find({i, vocab.terms[j]});
      if (it == reference.end()) {
        CHECK(actual == 0.0);
      } else {
        ++nonzero;
        CHECK(actual == doctest::Approx(it->second).epsilon(0).scale(1.0));
        CHECK(std::abs(actual - it->second) <= 1e-9);
      }
    }
  }
  CHECK(nonzero == reference.size());
  CHECK(vocab.index.count("medical history"));  // bigram present, df 2
}

TEST_CASE("document-term matrix invariants on random corpora") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> pool = {"law",  "case", "fact",  "court",
                                         "rule", "act",  "claim", "body",
                                         "test", "sign"};
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> n_docs(2, 12);
    std::uniform_int_distribution<int> n_words(1, 9);
    std::uniform_int_distribution<std::size_t> word(0, pool.size() - 1);
    Corpus corpus;
    const int docs = n_docs(rng);
    for (int d = 0; d < docs; ++d) {
      std::string text;
      const int words = n_words(rng);
      for (int w = 0; w < words; ++w) {
        if (w) text += " ";
        text += pool[word(rng)];
      }
      corpus.documents.push_back({"d" + std::to_string(d), text, {}});
    }
    Vocabulary vocab;
    try {
      vocab = build_vocabulary(corpus);
    } catch (const EmptyVocabularyError&) {
      continue;
    }
    const DocTermMatrix X = build_tfidf(corpus, vocab);

    // nonnegativity and row normalization
    std::vector<double> row_norm_sq(X.rows(), 0.0);
    std::vector<int> col_nonzeros(X.cols(), 0);
    for (int i = 0; i < X.rows(); ++i) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
               X.values, i);
           it; ++it) {
        CHECK(it.value() >= 0.0);
        row_norm_sq[i] += it.value() * it.value();
        ++col_nonzeros[it.col()];
      }
    }
    for (int i = 0; i < X.rows(); ++i) {
      if (row_norm_sq[i] > 0.0) {
        CHECK(std::abs(std::sqrt(row_norm_sq[i]) - 1.0) <= 1e-9);
      }
    }
    // column/df consistency
    for (int j = 0; j < X.cols(); ++j) {
      CHECK(col_nonzeros[j] <= vocab.df[j]);
    }

    // determinism: rebuild and compare bit for bit
    const Vocabulary vocab2 = build_vocabulary(corpus);
    CHECK(vocab.terms == vocab2.terms);
    const DocTermMatrix X2 = build_tfidf(corpus, vocab2);
    REQUIRE(X2.values.nonZeros() == X.values.nonZeros());
    for (int i = 0; i < X.rows(); ++i) {
      for (int j = 0; j < X.cols(); ++j) {
        CHECK(X.values.coeff(i, j) == X2.values.coeff(i, j));
      }
    }
  }
}

TEST_CASE("corpus_fingerprint is order- and content-sensitive") {
  const Corpus a = make_corpus({"one", "two"});
  Corpus b = make_corpus({"one", "two"});
  CHECK(corpus_fingerprint(a) == corpus_fingerprint(b));
  b.documents[1].text = "three";
  CHECK(corpus_fingerprint(a) != corpus_fingerprint(b));
  Corpus c = make_corpus({"two", "one"});
  CHECK(corpus_fingerprint(a) != corpus_fingerprint(c));
}
