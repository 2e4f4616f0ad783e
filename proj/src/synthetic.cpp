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

#include "mvrag/synthetic.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "mvrag/error.hpp"

namespace mvrag {

namespace {

const char* kFacetNames[] = {"anatomy", "contract", "harvest",
                             "galaxy",  "molecule", "voltage"};

std::string facet_base(int facet) {
  if (facet < static_cast<int>(std::size(kFacetNames))) {
    return kFacetNames[facet];
  }
  return "domain" + std::to_string(facet);
}

std::string zero_pad(int value, int width) {
  std::ostringstream out;
  out.width(width);
  out.fill('0');
  out << value;
  return out.str();
}

// Partial Fisher-Yates draw of `count` distinct items, stable across
// platforms (std::sample is implementation-defined).
std::vector<std::string> draw(std::mt19937_64& rng,
                              const std::vector<std::string>& pool,
                              int count) {
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 0; i < count && i < static_cast<int>(idx.size()); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(pool[idx[i]]);
  }
  return out;
}

// Head tokens interleaved with the leading tail tokens so the head does not
// form a head-head bigram in every document.
std::string doc_text(const std::string& head, int head_repeat,
                     const std::vector<std::string>& tails) {
  std::vector<std::string> tokens;
  std::size_t t = 0;
  for (int h = 0; h < head_repeat; ++h) {
    tokens.push_back(head);
    if (t < tails.size()) tokens.push_back(tails[t++]);
  }
  for (; t < tails.size(); ++t) tokens.push_back(tails[t]);
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) text += " ";
    text += tokens[i];
  }
  return text;
}

}  // namespace

PlantedBenchmark make_planted_benchmark(const PlantedFacetSpec& spec) {
  if (spec.n_facets < 1) {
    throw InvalidArgumentError("make_planted_benchmark: need >= 1 facet");
  }
  if (spec.query_generic_terms > 0 &&
      spec.rel_generic_terms > spec.query_generic_terms) {
    throw InvalidArgumentError(
        "make_planted_benchmark: relevant docs reuse the query's generic "
        "terms, so rel_generic_terms must not exceed query_generic_terms");
  }

  std::mt19937_64 rng(spec.seed);
  PlantedBenchmark bench;
  bench.corpus.source_path = "<planted>";

  std::vector<std::vector<std::string>> tails(spec.n_facets);
  for (int f = 0; f < spec.n_facets; ++f) {
    bench.head_terms.push_back(facet_base(f) + "core");
    for (int t = 0; t < spec.tail_pool; ++t) {
      tails[f].push_back(facet_base(f) + "term" + zero_pad(t, 3));
    }
  }

  // Per-query draws: facet-0 generic terms carried by the query text.
  std::vector<std::vector<std::string>> query_generics(spec.queries);
  for (int q = 0; q < spec.queries; ++q) {
    query_generics[q] = draw(rng, tails[0], spec.query_generic_terms);
  }

  const auto unique_term = [&](int facet, int query, int which) {
    return facet_base(facet) + "q" + zero_pad(query, 2) +
           static_cast<char>('a' + which);
  };

  // Relevant documents: one per (facet, query). The facet-0 relevant document
  // reuses the query's own generic terms so the raw query pins it; other
  // facets' relevant documents are only reachable through their unique terms
  // and facet head.
  for (int f = 0; f < spec.n_facets; ++f) {
    for (int q = 0; q < spec.queries; ++q) {
      std::vector<std::string> doc_tails;
      for (int u = 0; u < spec.uniques_per_facet; ++u) {
        doc_tails.push_back(unique_term(f, q, u));
      }
      std::vector<std::string> generics;
      if (f == 0 && spec.query_generic_terms > 0) {
        generics.assign(query_generics[q].begin(),
                        query_generics[q].begin() + spec.rel_generic_terms);
      } else {
        generics = draw(rng, tails[f], spec.rel_generic_terms);
      }
      doc_tails.insert(doc_tails.end(), generics.begin(), generics.end());

      Document doc;
      doc.id = "f" + std::to_string(f) + "r" + zero_pad(q, 3);
      doc.text = doc_text(bench.head_terms[f], spec.head_repeat, doc_tails);
      doc.metadata["facet"] = std::to_string(f);
      bench.doc_facet[doc.id] = f;
      bench.corpus.documents.push_back(std::move(doc));
    }
  }

  // Distractors: head plus generic tails only. Facet-0 distractors repeat
  // their head more so they screen the raw query; other facets' distractors
  // stay quiet so rewrites do not echo them over the relevant documents.
  for (int f = 0; f < spec.n_facets; ++f) {
    const int head_repeat =
        f == 0 ? spec.masker_head_repeat : spec.distractor_head_repeat;
    for (int d = 0; d < spec.distractors_per_facet; ++d) {
      Document doc;
      doc.id = "f" + std::to_string(f) + "d" + zero_pad(d, 3);
      doc.text = doc_text(bench.head_terms[f], head_repeat,
                          draw(rng, tails[f], spec.doc_tail_terms));
      doc.metadata["facet"] = std::to_string(f);
      bench.doc_facet[doc.id] = f;
      bench.corpus.documents.push_back(std::move(doc));
    }
  }

  // Queries: facet-0 head repeated (surface bias), other heads once, the
  // facet-0 generic terms, and the unique terms of each facet's relevant
  // document.
  for (int q = 0; q < spec.queries; ++q) {
    std::vector<std::string> tokens;
    for (int f = 0; f < spec.n_facets; ++f) {
      const int repeat = f == 0 ? spec.query_head_bias : 1;
      for (int h = 0; h < repeat; ++h) tokens.push_back(bench.head_terms[f]);
    }
    tokens.insert(tokens.end(), query_generics[q].begin(),
                  query_generics[q].end());
    for (int f = 0; f < spec.n_facets; ++f) {
      for (int u = 0; u < spec.uniques_per_facet; ++u) {
        tokens.push_back(unique_term(f, q, u));
      }
    }
    QueryRecord record;
    record.id = "q" + zero_pad(q, 2);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) record.text += " ";
      record.text += tokens[i];
    }
    for (int f = 0; f < spec.n_facets; ++f) {
      bench.qrels.relevant[record.id].insert("f" + std::to_string(f) + "r" +
                                             zero_pad(q, 3));
    }
    bench.queries.push_back(std::move(record));
  }

  return bench;
}

void write_corpus_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write corpus file: " + path);
  }
  for (const auto& doc : corpus.documents) {
    nlohmann::json j;
    j["id"] = doc.id;
    j["text"] = doc.text;
    if (!doc.metadata.empty()) j["metadata"] = doc.metadata;
    out << j.dump() << "\n";
  }
  if (!out) {
    throw IoError("failed writing corpus file: " + path);
  }
}

void write_queries_tsv(const std::vector<QueryRecord>& queries,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write queries file: " + path);
  }
  for (const auto& q : queries) {
    out << q.id << "\t" << q.text << "\n";
  }
}

void write_qrels(const Qrels& qrels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write qrels file: " + path);
  }
  for (const auto& [qid, docs] : qrels.relevant) {
    for (const auto& doc : docs) {
      out << qid << " 0 " << doc << " 1\n";
    }
  }
}

}  // namespace mvrag
