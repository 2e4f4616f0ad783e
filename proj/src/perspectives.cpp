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

#include "mvrag/perspectives.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"
#include "mvrag/error.hpp"

namespace mvrag {

PerspectiveSet align_perspectives(const PcaModel& pca, const TopicTerms& terms,
                                  const EmbedderConfig& embedder,
                                  PerspectiveRepresentation representation) {
  // Candidate set: union of all topics' terms, deduplicated, lexicographic
  // so that tie-breaking is deterministic.
  std::set<std::string> unique_terms;
  for (const auto& topic : terms.topics) {
    for (const auto& [term, weight] : topic) unique_terms.insert(term);
  }
  std::vector<std::string> candidates(unique_terms.begin(), unique_terms.end());

  const int n_components = pca.n_components();
  if (static_cast<int>(candidates.size()) < n_components) {
    throw InsufficientTermsError(
        "align_perspectives: " + std::to_string(candidates.size()) +
        " candidate terms for " + std::to_string(n_components) + " components");
  }

  const std::vector<EmbeddingVector> term_vectors =
      embed_texts(candidates, embedder);
  if (term_vectors.front().dim() != pca.components.cols()) {
    throw DimMismatchError(
        "align_perspectives: term embedding dim " +
        std::to_string(term_vectors.front().dim()) +
        " does not match component dim " +
        std::to_string(pca.components.cols()));
  }

  PerspectiveSet set;
  set.embedder = embedder;
  set.representation = representation;

  std::vector<bool> assigned(candidates.size(), false);
  // Components are already in descending explained-variance order.
  for (int c = 0; c < n_components; ++c) {
    EmbeddingVector component{pca.components.row(c).transpose()};
    int best = -1;
    double best_score = -2.0;
    for (std::size_t t = 0; t < candidates.size(); ++t) {
      if (assigned[t]) continue;
      const double score = cosine(component, term_vectors[t]);
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(t);
      }
    }
    assigned[best] = true;

    Perspective p;
    p.id = c;
    p.label = candidates[best];
    p.component_index = c;
    p.alignment_score = best_score;
    p.representation = representation == PerspectiveRepresentation::term
                           ? term_vectors[best]
                           : normalized(component);
    set.perspectives.push_back(std::move(p));
  }
  return set;
}

namespace {

const char* representation_name(PerspectiveRepresentation rep) {
  return rep == PerspectiveRepresentation::term ? "term" : "component";
}

PerspectiveRepresentation representation_from(const std::string& name) {
  if (name == "term") return PerspectiveRepresentation::term;
  if (name == "component") return PerspectiveRepresentation::component;
  throw FormatError("unknown representation: " + name);
}

nlohmann::json embedder_json(const EmbedderConfig& config) {
  nlohmann::json j;
  j["provider"] =
      config.provider == EmbedderProvider::hashing ? "hashing" : "remote";
  j["dim"] = config.dim;
  j["seed"] = config.seed;
  if (!config.model.empty()) j["model"] = config.model;
  if (!config.endpoint.empty()) j["endpoint"] = config.endpoint;
  return j;
}

EmbedderConfig embedder_from_json(const nlohmann::json& j) {
  EmbedderConfig config;
  const std::string provider = j.value("provider", "hashing");
  config.provider = provider == "remote" ? EmbedderProvider::remote
                                         : EmbedderProvider::hashing;
  config.dim = j.value("dim", 256);
  config.seed = j.value("seed", std::uint64_t{42});
  config.model = j.value("model", "");
  config.endpoint = j.value("endpoint", "");
  return config;
}

}  // namespace

void save_perspectives(const PerspectiveSet& set, const std::string& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["corpus_fingerprint"] = set.corpus_fingerprint;
  j["params"] = {{"variance_target", set.variance_target},
                 {"r", set.r},
                 {"k", set.k_terms},
                 {"seed", set.seed},
                 {"embedder", embedder_json(set.embedder)},
                 {"representation", representation_name(set.representation)}};
  nlohmann::json items = nlohmann::json::array();
  for (const auto& p : set.perspectives) {
    std::vector<double> values(p.representation.values.data(),
                               p.representation.values.data() +
                                   p.representation.values.size());
    items.push_back({{"id", p.id},
                     {"label", p.label},
                     {"representation", values},
                     {"component_index", p.component_index},
                     {"alignment_score", p.alignment_score}});
  }
  j["perspectives"] = std::move(items);

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write perspectives file: " + path);
  }
  out << j.dump(2) << "\n";
  if (!out) {
    throw IoError("failed writing perspectives file: " + path);
  }
}

PerspectiveSet load_perspectives(const std::string& path, const Corpus* corpus,
                                 bool verify_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open perspectives file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid perspectives file " + path + ": " + e.what());
  }

  PerspectiveSet set;
  try {
    set.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
    const auto& params = j.at("params");
    set.variance_target = params.at("variance_target").get<double>();
    set.r = params.at("r").get<int>();
    set.k_terms = params.at("k").get<int>();
    set.seed = params.at("seed").get<std::uint64_t>();
    set.embedder = embedder_from_json(params.at("embedder"));
    set.representation =
        representation_from(params.value("representation", "term"));
    for (const auto& item : j.at("perspectives")) {
      Perspective p;
      p.id = item.at("id").get<int>();
      p.label = item.at("label").get<std::string>();
      p.component_index = item.at("component_index").get<int>();
      p.alignment_score = item.at("alignment_score").get<double>();
      const auto& values = item.at("representation");
      p.representation.values.resize(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        p.representation.values[static_cast<Eigen::Index>(i)] =
            values[i].get<double>();
      }
      set.perspectives.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid perspectives file " + path + ": " + e.what());
  }
  if (set.perspectives.empty()) {
    throw FormatError("perspectives file has no perspectives: " + path);
  }

  if (corpus != nullptr && verify_fingerprint) {
    const std::string actual = corpus_fingerprint(*corpus);
    if (actual != set.corpus_fingerprint) {
      throw FingerprintMismatchError(
          "perspectives were built from a different corpus (expected " +
          set.corpus_fingerprint + ", got " + actual + ")");
    }
  }
  return set;
}

}  // namespace mvrag
