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

#include "mvrag/decomposition.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "mvrag/error.hpp"

namespace mvrag {

PcaModel pca_fit(const Eigen::MatrixXd& doc_vectors, const PcaOptions& options) {
  const Eigen::Index rows = doc_vectors.rows();
  const Eigen::Index cols = doc_vectors.cols();
  if (rows < 2) {
    throw InvalidArgumentError("pca_fit: need at least 2 rows");
  }
  if (cols < 1) {
    throw InvalidArgumentError("pca_fit: need at least 1 column");
  }
  if (options.variance_target <= 0.0 || options.variance_target > 1.0) {
    throw InvalidArgumentError("pca_fit: variance_target must be in (0, 1]");
  }

  PcaModel model;
  model.mean = doc_vectors.colwise().mean();
  Eigen::MatrixXd centered = doc_vectors.rowwise() - model.mean.transpose();

  const double scale = doc_vectors.norm();
  if (centered.norm() <= 1e-12 * std::max(1.0, scale)) {
    throw DegenerateInputError("pca_fit: all rows are identical");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();

  Eigen::VectorXd variances = sigma.array().square() / double(rows - 1);
  const double total = variances.sum();

  const int cap = static_cast<int>(
      std::min<Eigen::Index>({rows - 1, cols, options.max_components}));
  int kept = 0;
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < sigma.size() && kept < cap; ++i) {
    cumulative += variances[i] / total;
    ++kept;
    if (cumulative >= options.variance_target - 1e-12) break;
  }

  model.components = svd.matrixV().leftCols(kept).transpose();
  model.explained_variance_ratio = (variances.head(kept) / total).eval();

  // Deterministic sign: largest-magnitude entry of each component positive.
  for (Eigen::Index i = 0; i < model.components.rows(); ++i) {
    Eigen::Index arg = 0;
    model.components.row(i).cwiseAbs().maxCoeff(&arg);
    if (model.components(i, arg) < 0.0) {
      model.components.row(i) = -model.components.row(i);
    }
  }
  return model;
}

namespace {

// ||X - WH||_F. Dense residual for small problems; the Gram-matrix identity
// ||X||^2 - 2<X,WH> + tr((W'W)(HH')) for large ones, which never forms WH.
double frobenius_error(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X,
                       const Eigen::MatrixXd& W, const Eigen::MatrixXd& H) {
  const Eigen::Index size = X.rows() * X.cols();
  if (size <= 4'000'000) {
    Eigen::MatrixXd dense = Eigen::MatrixXd(X) - W * H;
    return dense.norm();
  }
  double cross = 0.0;
  for (Eigen::Index i = 0; i < X.outerSize(); ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(X, i);
         it; ++it) {
      cross += it.value() * W.row(it.row()).dot(H.col(it.col()));
    }
  }
  const Eigen::MatrixXd WtW = W.transpose() * W;
  const Eigen::MatrixXd HHt = H * H.transpose();
  const double wh_sq = WtW.cwiseProduct(HHt).sum();
  const double x_sq = X.squaredNorm();
  return std::sqrt(std::max(0.0, x_sq - 2.0 * cross + wh_sq));
}

}  // namespace

NmfModel nmf_fit(const DocTermMatrix& X, int r, const NmfConfig& config) {
  const Eigen::Index rows = X.rows();
  const Eigen::Index cols = X.cols();
  if (r < 1 || r > std::min(rows, cols)) {
    throw InvalidRankError("nmf_fit: rank " + std::to_string(r) +
                           " invalid for a " + std::to_string(rows) + "x" +
                           std::to_string(cols) + " matrix");
  }

  NmfModel model;
  model.r = r;
  model.seed = config.seed;

  // Uniform init scaled to sqrt(mean(X)/r) so W*H starts near the data scale.
  const double mean = X.values.sum() / double(rows * cols);
  const double scale = std::sqrt(std::max(mean, 1e-12) / r);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd W(rows, r);
  Eigen::MatrixXd H(r, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < r; ++j) W(i, j) = dist(rng) * scale;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) H(i, j) = dist(rng) * scale;

  double objective = frobenius_error(X.values, W, H);
  model.objective_trace.push_back(objective);

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    // H <- H .* (W'X) ./ (W'WH + eps)
    const Eigen::MatrixXd WtX = W.transpose() * X.values;
    const Eigen::MatrixXd WtWH = (W.transpose() * W) * H;
    H.array() *= WtX.array() / (WtWH.array() + config.epsilon);

    // W <- W .* (XH') ./ (WHH' + eps)
    const Eigen::MatrixXd XHt = X.values * H.transpose();
    const Eigen::MatrixXd WHHt = W * (H * H.transpose());
    W.array() *= XHt.array() / (WHHt.array() + config.epsilon);

    const double next = frobenius_error(X.values, W, H);
    model.objective_trace.push_back(next);
    model.iterations = iter;
    if (config.on_iteration) config.on_iteration(iter, W, H, next);

    const double change = std::abs(objective - next) / std::max(objective, 1e-12);
    objective = next;
    if (change < config.tolerance) break;
  }

  model.W = std::move(W);
  model.H = std::move(H);
  return model;
}

TopicTerms top_terms(const NmfModel& model, const Vocabulary& vocab, int k) {
  const auto m = static_cast<int>(model.H.cols());
  if (m != vocab.size()) {
    throw ShapeMismatchError("top_terms: H has " + std::to_string(m) +
                             " columns but vocabulary has " +
                             std::to_string(vocab.size()) + " terms");
  }
  if (k < 1 || k > m) {
    throw InvalidArgumentError("top_terms: k must be in [1, m]");
  }

  TopicTerms result;
  result.k = k;
  result.topics.reserve(model.H.rows());
  for (Eigen::Index row = 0; row < model.H.rows(); ++row) {
    std::vector<std::pair<std::string, double>> entries;
    entries.reserve(m);
    for (int col = 0; col < m; ++col) {
      entries.emplace_back(vocab.terms[col], model.H(row, col));
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    entries.resize(k);
    result.topics.push_back(std::move(entries));
  }
  return result;
}

namespace {

using PresenceMap = std::map<std::string, std::set<int>>;

PresenceMap build_presence(const std::set<std::string>& terms,
                           const Corpus& corpus,
                           const TokenizerConfig& tokenizer) {
  PresenceMap presence;
  for (const auto& t : terms) presence[t];
  for (int d = 0; d < static_cast<int>(corpus.size()); ++d) {
    const auto tokens = tokenize(corpus.documents[d].text, tokenizer);
    std::set<std::string> in_doc(tokens.begin(), tokens.end());
    for (auto& bg : bigrams(tokens)) in_doc.insert(std::move(bg));
    for (auto& [term, docs] : presence) {
      if (in_doc.count(term)) docs.insert(d);
    }
  }
  return presence;
}

double umass_coherence(const std::vector<std::string>& topic,
                       const PresenceMap& presence) {
  double score = 0.0;
  for (std::size_t i = 0; i < topic.size(); ++i) {
    for (std::size_t j = i + 1; j < topic.size(); ++j) {
      const auto& di = presence.at(topic[i]);
      const auto& dj = presence.at(topic[j]);
      std::size_t both = 0;
      for (int doc : di) {
        if (dj.count(doc)) ++both;
      }
      const double denom = std::max<std::size_t>(dj.size(), 1);
      score += std::log((static_cast<double>(both) + 1.0) / denom);
    }
  }
  return score;
}

}  // namespace

double coherence(const std::vector<std::string>& topic, const Corpus& corpus,
                 const TokenizerConfig& tokenizer) {
  if (topic.size() < 2) {
    throw InvalidArgumentError("coherence: need at least 2 terms");
  }
  std::set<std::string> terms(topic.begin(), topic.end());
  return umass_coherence(topic, build_presence(terms, corpus, tokenizer));
}

int select_topic_count(const DocTermMatrix& X, const Corpus& corpus,
                       const Vocabulary& vocab, const std::vector<int>& grid,
                       const NmfConfig& config, int coherence_top_k) {
  if (grid.empty()) {
    throw InvalidArgumentError("select_topic_count: grid is empty");
  }
  std::vector<int> candidates(grid);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  for (int r : candidates) {
    if (r < 1 || r > std::min(X.rows(), X.cols())) {
      throw InvalidRankError("select_topic_count: candidate rank " +
                             std::to_string(r) + " is out of range");
    }
  }
  if (candidates.size() == 1) return candidates.front();

  const int k = std::min(coherence_top_k, vocab.size());
  int best_r = candidates.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (int r : candidates) {
    NmfModel model = nmf_fit(X, r, config);
    TopicTerms topics = top_terms(model, vocab, k);

    std::set<std::string> all_terms;
    std::vector<std::vector<std::string>> term_lists;
    for (const auto& topic : topics.topics) {
      std::vector<std::string> terms;
      for (const auto& [term, weight] : topic) {
        terms.push_back(term);
        all_terms.insert(term);
      }
      term_lists.push_back(std::move(terms));
    }
    const PresenceMap presence =
        build_presence(all_terms, corpus, vocab.config.tokenizer);
    double mean = 0.0;
    for (const auto& terms : term_lists) {
      mean += umass_coherence(terms, presence);
    }
    mean /= static_cast<double>(term_lists.size());

    if (mean > best_score) {
      best_score = mean;
      best_r = r;
    }
  }
  return best_r;
}

}  // namespace mvrag
