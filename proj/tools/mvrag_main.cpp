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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvrag/error.hpp"
#include "mvrag/eval.hpp"
#include "mvrag/intent.hpp"
#include "mvrag/pipeline.hpp"
#include "mvrag/synthetic.hpp"

namespace {

struct CliOptions {
  std::string corpus_path;
  std::string perspectives_path = "perspectives.json";
  std::string index_path = "index.bin";
  std::string qrels_path;
  std::string queries_path;
  std::string calibration_path;
  std::string run_file;
  std::string out_path;

  int k = 10;
  int final_k = 8;
  std::string rerank_mode = "paper";
  double theta = std::numeric_limits<double>::quiet_NaN();
  double percentile = 0.30;
  std::uint64_t seed = 42;
  bool no_reader = false;

  std::string embedder_provider = "hashing";
  int dim = 256;
  std::string embedder_endpoint;
  std::string embedder_model;

  std::string rewriter_provider = "mock";
  std::string rewriter_endpoint;
  std::string rewriter_model;

  std::string reader_provider = "mock";
  std::string reader_endpoint;
  std::string reader_model;

  double variance_target = 0.90;
  int max_components = 64;
  std::vector<int> topic_grid = {2, 3, 4, 5, 6, 7, 8};
  int fixed_r = 0;
  int k_terms = 10;
  int min_df = 2;
  int max_terms = 50000;
  int prompt_budget = 3000;
  std::string representation = "term";

  std::string query_text;
  int exclude_perspective = -1;
  std::vector<std::string> evidences;
  std::vector<double> evidence_scores;
  std::string scorer = "additive";
};

mvrag::PipelineConfig to_pipeline_config(const CliOptions& opt) {
  mvrag::PipelineConfig config;
  config.corpus_path = opt.corpus_path;

  config.embedder.provider = opt.embedder_provider == "remote"
                                 ? mvrag::EmbedderProvider::remote
                                 : mvrag::EmbedderProvider::hashing;
  config.embedder.dim = opt.dim;
  config.embedder.seed = opt.seed;
  config.embedder.endpoint = opt.embedder_endpoint;
  config.embedder.model = opt.embedder_model;

  config.rewriter.provider = opt.rewriter_provider == "remote"
                                 ? mvrag::ChatProvider::remote
                                 : mvrag::ChatProvider::mock;
  config.rewriter.endpoint = opt.rewriter_endpoint;
  config.rewriter.model = opt.rewriter_model;

  config.reader.provider = opt.reader_provider == "remote"
                               ? mvrag::ChatProvider::remote
                               : mvrag::ChatProvider::mock;
  config.reader.endpoint = opt.reader_endpoint;
  config.reader.model = opt.reader_model;

  config.vocab.min_df = opt.min_df;
  config.vocab.max_terms = opt.max_terms;

  config.variance_target = opt.variance_target;
  config.max_components = opt.max_components;
  config.topic_grid = opt.topic_grid;
  config.fixed_r = opt.fixed_r;
  config.k_terms = opt.k_terms;
  config.theta = opt.theta;
  config.percentile = opt.percentile;
  config.per_perspective_k = opt.k;
  config.final_k = opt.final_k;
  config.rerank_mode = opt.rerank_mode == "weighted"
                           ? mvrag::RerankMode::weighted
                           : mvrag::RerankMode::paper;
  config.representation = opt.representation == "component"
                              ? mvrag::PerspectiveRepresentation::component
                              : mvrag::PerspectiveRepresentation::term;
  config.prompt_token_budget = opt.prompt_budget;
  config.seed = opt.seed;
  return config;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw mvrag::IoError("cannot write file: " + path);
  }
  out << content;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw mvrag::IoError("cannot open file: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

double theta_from_options(const CliOptions& opt) {
  if (opt.theta == opt.theta) return opt.theta;
  if (!opt.calibration_path.empty()) {
    std::ifstream in(opt.calibration_path);
    if (!in) {
      throw mvrag::IoError("cannot open calibration file: " +
                           opt.calibration_path);
    }
    nlohmann::json j;
    in >> j;
    return j.at("theta").get<double>();
  }
  throw mvrag::InvalidArgumentError(
      "no threshold available: pass --theta or --calibration");
}

int cmd_build_perspectives(const CliOptions& opt) {
  const mvrag::PipelineConfig config = to_pipeline_config(opt);
  const mvrag::Corpus corpus = mvrag::load_corpus(opt.corpus_path);

  mvrag::StageTimings timings;
  const mvrag::PerspectiveSet set =
      mvrag::extract_perspectives(corpus, config, &timings);
  mvrag::save_perspectives(set, opt.perspectives_path);

  const auto index_start = std::chrono::steady_clock::now();
  const mvrag::VectorIndex index = mvrag::build_index(corpus, config.embedder);
  mvrag::save_index(index, opt.index_path);
  const std::chrono::duration<double> index_elapsed =
      std::chrono::steady_clock::now() - index_start;
  timings.emplace_back("build_index", index_elapsed.count());

  std::cout << "stage timings (offline):\n";
  double total = 0.0;
  for (const auto& [stage, seconds] : timings) {
    std::cout << "  " << stage;
    for (std::size_t pad = stage.size(); pad < 22; ++pad) std::cout << ' ';
    std::cout << std::fixed << std::setprecision(3) << seconds << " s\n";
    total += seconds;
  }
  std::cout << "  total                 " << std::fixed << std::setprecision(3)
            << total << " s\n";
  std::cout << "perspectives: " << opt.perspectives_path << " (" << set.size()
            << " perspectives, r=" << set.r << ")\n";
  std::cout << "index: " << opt.index_path << " (" << index.size() << " x "
            << index.dim() << ")\n";
  return 0;
}

int cmd_calibrate(const CliOptions& opt) {
  const mvrag::PipelineConfig config = to_pipeline_config(opt);
  const mvrag::PerspectiveSet set =
      mvrag::load_perspectives(opt.perspectives_path);
  const std::vector<std::string> queries = read_lines(opt.queries_path);
  const mvrag::ThresholdCalibration calibration = mvrag::calibrate_threshold(
      queries, set, opt.percentile, config.embedder);

  nlohmann::json j = {{"theta", calibration.theta},
                      {"percentile", calibration.percentile},
                      {"sample_size", calibration.sample_size},
                      {"score_min", calibration.score_min},
                      {"score_median", calibration.score_median},
                      {"score_max", calibration.score_max}};
  const std::string out = opt.out_path.empty() ? "calibration.json" : opt.out_path;
  write_text_file(out, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_query(const CliOptions& opt) {
  mvrag::PipelineConfig config = to_pipeline_config(opt);
  config.theta = theta_from_options(opt);

  const mvrag::Corpus corpus = mvrag::load_corpus(opt.corpus_path);
  const mvrag::PerspectiveSet set =
      mvrag::load_perspectives(opt.perspectives_path, &corpus);
  const mvrag::VectorIndex index = mvrag::load_index(opt.index_path);

  const mvrag::QueryTrace trace = mvrag::run_query(
      opt.query_text, set, index, corpus, config, !opt.no_reader);
  std::cout << mvrag::trace_json(trace).dump(2) << "\n";
  return 0;
}

mvrag::BenchmarkConfig to_benchmark_config(const CliOptions& opt) {
  mvrag::BenchmarkConfig config;
  config.per_perspective_k = opt.k;
  config.final_k = std::max(opt.final_k, 10);  // metrics need depth 10
  config.rerank_mode = opt.rerank_mode == "weighted"
                           ? mvrag::RerankMode::weighted
                           : mvrag::RerankMode::paper;
  config.theta = opt.theta;
  config.percentile = opt.percentile;
  return config;
}

int run_evaluation(const CliOptions& opt, int excluded) {
  const mvrag::PipelineConfig pipeline = to_pipeline_config(opt);
  const mvrag::Corpus corpus = mvrag::load_corpus(opt.corpus_path);
  const mvrag::PerspectiveSet set =
      mvrag::load_perspectives(opt.perspectives_path, &corpus);
  const mvrag::VectorIndex index = mvrag::load_index(opt.index_path);
  const auto queries = mvrag::load_queries_tsv(opt.queries_path);
  const mvrag::Qrels qrels = mvrag::load_qrels(opt.qrels_path);

  mvrag::BenchmarkConfig config = to_benchmark_config(opt);
  mvrag::EvaluationReport report;
  if (excluded >= 0) {
    report = mvrag::ablate_perspective(corpus, queries, qrels, set, index,
                                       pipeline.embedder, pipeline.rewriter,
                                       config, excluded);
  } else {
    report = mvrag::run_benchmark(corpus, queries, qrels, set, index,
                                  pipeline.embedder, pipeline.rewriter, config);
  }

  if (!opt.run_file.empty()) {
    const auto run = mvrag::load_run_file(opt.run_file);
    report.methods["run_file"] = mvrag::evaluate_run(run, qrels);
  }

  const std::string prefix = opt.out_path.empty() ? "report" : opt.out_path;
  write_text_file(prefix + ".json", mvrag::report_json(report).dump(2) + "\n");
  write_text_file(prefix + ".txt", mvrag::report_table(report));
  std::cout << mvrag::report_table(report);
  return 0;
}

int cmd_interactions(const CliOptions& opt) {
  mvrag::SubsetScorer scorer;
  if (opt.scorer == "additive") {
    std::map<std::string, double> per_doc;
    for (std::size_t i = 0; i < opt.evidences.size(); ++i) {
      per_doc[opt.evidences[i]] =
          i < opt.evidence_scores.size() ? opt.evidence_scores[i] : 1.0;
    }
    scorer = mvrag::additive_scorer(per_doc);
  } else if (opt.scorer == "redundant-pair") {
    scorer = mvrag::redundant_pair_scorer(opt.evidences[0], opt.evidences[1]);
  } else if (opt.scorer == "complementary-pair") {
    scorer = mvrag::complementary_pair_scorer(opt.evidences[0], opt.evidences[1]);
  } else {
    throw mvrag::InvalidArgumentError("unknown scorer: " + opt.scorer);
  }

  const mvrag::InteractionMatrix matrix =
      mvrag::interaction_matrix(opt.evidences, scorer);
  const std::string csv = mvrag::interaction_csv(matrix);
  if (!opt.out_path.empty()) {
    write_text_file(opt.out_path, csv);
  }
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MVRAG: multi-view retrieval-augmented generation pipeline"};
  app.fallthrough();
  app.set_config("--config", "", "Config file (TOML-style key/value)");

  CliOptions opt;

  app.add_option("--corpus", opt.corpus_path, "Corpus JSONL file");
  app.add_option("--perspectives", opt.perspectives_path,
                 "Perspective set JSON artifact");
  app.add_option("--index", opt.index_path, "Vector index artifact");
  app.add_option("--qrels", opt.qrels_path, "TREC qrels file");
  app.add_option("--queries", opt.queries_path, "Queries file");
  app.add_option("--calibration", opt.calibration_path,
                 "Threshold calibration JSON (query command)");
  app.add_option("--run-file", opt.run_file, "External TREC run file");
  app.add_option("--out", opt.out_path, "Output path or prefix");
  app.add_option("--k", opt.k, "Per-perspective retrieval depth");
  app.add_option("--final-k", opt.final_k, "Final depth after re-ranking");
  app.add_option("--rerank-mode", opt.rerank_mode, "paper | weighted")
      ->check(CLI::IsMember({"paper", "weighted"}));
  app.add_option("--theta", opt.theta, "Perspective weight threshold");
  app.add_option("--percentile", opt.percentile,
                 "Calibration percentile (default 0.30)");
  app.add_option("--seed", opt.seed, "Seed for NMF init and hashing embedder");
  app.add_flag("--no-reader", opt.no_reader, "Stop before the reader call");

  app.add_option("--embedder", opt.embedder_provider, "hashing | remote")
      ->check(CLI::IsMember({"hashing", "remote"}));
  app.add_option("--dim", opt.dim, "Hashing embedder dimension");
  app.add_option("--embedder-endpoint", opt.embedder_endpoint,
                 "Remote embeddings base URL");
  app.add_option("--embedder-model", opt.embedder_model,
                 "Remote embeddings model id");

  app.add_option("--rewriter", opt.rewriter_provider, "mock | remote")
      ->check(CLI::IsMember({"mock", "remote"}));
  app.add_option("--rewriter-endpoint", opt.rewriter_endpoint,
                 "Remote chat completions base URL");
  app.add_option("--rewriter-model", opt.rewriter_model,
                 "Remote rewriter model id");

  app.add_option("--reader", opt.reader_provider, "mock | remote")
      ->check(CLI::IsMember({"mock", "remote"}));
  app.add_option("--reader-endpoint", opt.reader_endpoint,
                 "Remote reader base URL");
  app.add_option("--reader-model", opt.reader_model, "Remote reader model id");

  app.add_option("--variance-target", opt.variance_target,
                 "PCA cumulative variance target");
  app.add_option("--max-components", opt.max_components,
                 "Cap on kept principal components");
  app.add_option("--topic-grid", opt.topic_grid,
                 "Candidate topic counts, comma separated")
      ->delimiter(',');
  app.add_option("--fixed-r", opt.fixed_r,
                 "Pin the topic count (skips the grid search)");
  app.add_option("--k-terms", opt.k_terms, "Top terms per topic");
  app.add_option("--min-df", opt.min_df, "Vocabulary min document frequency");
  app.add_option("--max-terms", opt.max_terms, "Vocabulary size cap");
  app.add_option("--prompt-budget", opt.prompt_budget,
                 "Reader prompt token budget");
  app.add_option("--representation", opt.representation, "term | component")
      ->check(CLI::IsMember({"term", "component"}));

  auto* build = app.add_subcommand("build-perspectives",
                                   "Extract perspectives and build the index");
  auto* calibrate =
      app.add_subcommand("calibrate", "Calibrate the weight threshold");
  auto* query = app.add_subcommand("query", "Run the online pipeline once");
  query->add_option("query_text", opt.query_text, "Query string")->required();
  auto* evaluate =
      app.add_subcommand("evaluate", "Benchmark baseline vs mvrag");
  auto* ablate = app.add_subcommand("ablate", "Benchmark with one perspective excluded");
  ablate
      ->add_option("--exclude-perspective", opt.exclude_perspective,
                   "Perspective id to exclude")
      ->required();
  auto* interactions =
      app.add_subcommand("interactions", "Export an evidence interaction matrix");
  interactions
      ->add_option("--evidences", opt.evidences, "Evidence ids, comma separated")
      ->delimiter(',')
      ->required();
  interactions->add_option("--scores", opt.evidence_scores,
                           "Per-evidence scores for the additive scorer")
      ->delimiter(',');
  interactions
      ->add_option("--scorer", opt.scorer,
                   "additive | redundant-pair | complementary-pair")
      ->check(CLI::IsMember({"additive", "redundant-pair", "complementary-pair"}));

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto require = [](const std::string& value, const std::string& flag) {
      if (value.empty()) {
        throw mvrag::InvalidArgumentError("missing required option " + flag);
      }
    };
    if (build->parsed()) {
      require(opt.corpus_path, "--corpus");
      return cmd_build_perspectives(opt);
    }
    if (calibrate->parsed()) {
      require(opt.queries_path, "--queries");
      return cmd_calibrate(opt);
    }
    if (query->parsed()) {
      require(opt.corpus_path, "--corpus");
      return cmd_query(opt);
    }
    if (evaluate->parsed()) {
      require(opt.corpus_path, "--corpus");
      require(opt.queries_path, "--queries");
      require(opt.qrels_path, "--qrels");
      return run_evaluation(opt, -1);
    }
    if (ablate->parsed()) {
      require(opt.corpus_path, "--corpus");
      require(opt.queries_path, "--queries");
      require(opt.qrels_path, "--qrels");
      return run_evaluation(opt, opt.exclude_perspective);
    }
    if (interactions->parsed()) {
      if (opt.evidences.size() < 2) {
        throw mvrag::InvalidArgumentError("--evidences needs at least 2 ids");
      }
      return cmd_interactions(opt);
    }
  } catch (const mvrag::InvalidArgumentError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const mvrag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
